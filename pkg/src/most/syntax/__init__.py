from .ast import *  # noqa: F401,F403
from .ast import Declaration, Program, alpha_eq, free_channels, princ
from .parser import parse_file, parse_program, parse_type
from .pretty import pretty_declaration, pretty_process, pretty_program, pretty_type
