from .abstract import *
from .designs import *
from .reference import *
from .functions import *
from .checkpoint import *


def names():
    return DESIGNS.names()
