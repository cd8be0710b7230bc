from .decpart import DecGraph, build, path_partial
from .workbench import DecoratedPartialGroup
