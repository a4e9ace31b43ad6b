from .core import *
from .environments import ENVIRONMENTS, env_name, Environment, GridWorld
from .io import *
from . import environments
