"""Instruction set of the rule tape.

A compiled rule is a flat (op, a, b) triple list evaluated on a float
stack. Booleans are 0.0/1.0 and symbols are interned integer codes, so the
whole machine runs on doubles. Both kernel backends implement exactly this
set; the numbering is part of the contract between them.
"""

OP_END = 0
OP_CONST = 1          # a: constant-pool index
OP_LOAD_SELF = 2      # a: state column
OP_LOAD_OTHER = 3     # a: state column (aggregate element)
OP_LOAD_SELF_X = 4
OP_LOAD_SELF_Y = 5
OP_LOAD_OTHER_X = 6
OP_LOAD_OTHER_Y = 7
OP_LOAD_PARAM = 8     # a: parameter slot

OP_ADD = 9
OP_SUB = 10
OP_MUL = 11
OP_DIV = 12           # error on zero divisor
OP_MOD = 13           # C fmod semantics; error on zero divisor
OP_NEG = 14

OP_LT = 15
OP_LE = 16
OP_GT = 17
OP_GE = 18
OP_EQ = 19
OP_NE = 20

OP_AND = 21
OP_OR = 22
OP_NOT = 23

OP_JMP = 24           # a: absolute target
OP_JIF = 25           # a: absolute target; pops, jumps when 0.0

OP_AGG = 26           # a: aggregate kind, b: sub-program index
OP_RANDOM = 27        # a: stream index
OP_CHOOSE = 28        # a: stream index, b: option count (pops b values)
OP_STORE = 29         # a: output state column (transition rules)

OP_LOC_STAY = 30
OP_LOC_JUMP = 31      # pops y, x
OP_LOC_STEP = 32      # pops dy, dx
OP_LOC_RANDVAC = 33   # a: 1 if a radius was pushed, b: stream index

OP_NBR_KEEP = 34
OP_NBR_NONE = 35
OP_NBR_WITHIN = 36    # pops radius

AGG_COUNT = 0
AGG_FRACTION = 1
AGG_MIN = 2
AGG_MAX = 3

DOM_NEIGHBORS = 0
DOM_WITHIN = 1

METRIC_CHEBYSHEV = 0  # 'moore'
METRIC_MANHATTAN = 1  # 'vonneumann'
METRIC_EUCLIDEAN = 2

BOUNDARY_CLAMP = 0
BOUNDARY_TORUS = 1

KIND_LATTICE = 0
KIND_CONTINUOUS = 1

# VM status codes; nonzero aborts the step for that individual.
OK = 0
ERR_DIV_ZERO = 1
ERR_NONINT_COORD = 2
ERR_STACK = 3
ERR_BAD_OP = 4

STATUS_MESSAGES = {
    ERR_DIV_ZERO: "division by zero",
    ERR_NONINT_COORD: "movement produced a non-integer lattice coordinate",
    ERR_STACK: "expression stack overflow",
    ERR_BAD_OP: "corrupt rule program",
}

MAX_STACK = 128
