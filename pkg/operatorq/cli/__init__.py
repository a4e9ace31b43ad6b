from .commands import *
from . import helpers
