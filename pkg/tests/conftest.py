import random

import pytest

from boolclone.funcore import BoolFun, table_mask


def rand_fun(rng: random.Random, arity: int) -> BoolFun:
    return BoolFun(arity, rng.randrange(1 << (1 << arity)))


@pytest.fixture
def rng():
    return random.Random(0xC10E)
