"""Conic optimization layer

Exports:
- ConeBlock / ConeKind / ConeProgram / ProgramBuilder: standard-form programs
- validate / dump_program: structural checks and text dump
- svec / smat: scaled symmetric vectorization
- solve / SolverSettings / SolveResult / SolveStatus: interior-point solver
"""

from conic.program import ConeBlock, ConeKind, ConeProgram, ProgramBuilder, dump_program, validate
from conic.solver import SolveResult, SolverSettings, SolveStatus, solve
from conic.svec import smat, svec

__all__ = [
    'ConeBlock', 'ConeKind', 'ConeProgram', 'ProgramBuilder', 'dump_program', 'validate',
    'SolveResult', 'SolverSettings', 'SolveStatus', 'solve',
    'smat', 'svec',
]
