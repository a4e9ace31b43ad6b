from .abstract import *
from .families import *
from .sampler import *
from .io import *


def names():
    return FAMILIES.names()


def family(name, mdp, **options):
    return FAMILIES.create(name, mdp, **options)
