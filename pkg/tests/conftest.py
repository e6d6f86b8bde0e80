import pytest

from bohrlab import build_group


@pytest.fixture(scope="session")
def z4():
    return build_group("zmod:4")


@pytest.fixture(scope="session")
def z6():
    return build_group("zmod:6")


@pytest.fixture(scope="session")
def z12():
    return build_group("zmod:12")


@pytest.fixture(scope="session")
def z101():
    return build_group("zmod:101")


@pytest.fixture(scope="session")
def klein8():
    return build_group("product:zmod:2,zmod:2,zmod:2")


@pytest.fixture(scope="session")
def s3():
    return build_group("sym:3")


@pytest.fixture(scope="session")
def q8():
    return build_group("quaternion:8")


@pytest.fixture(scope="session")
def a5():
    return build_group("alt:5")
