from .dataset import *
from .io import *
