from .config import *
from .metrics import *
from .experiment import *
