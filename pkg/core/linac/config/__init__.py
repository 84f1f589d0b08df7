from .numeric_config import *
