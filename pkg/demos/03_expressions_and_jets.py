"""
Metric expressions with exact derivatives
=========================================

Metric components are written as small expressions in x1..xn. Each one is
evaluated together with its gradient and Hessian by second-order forward
propagation.
"""

import numpy as np

from pvmodels.expr import eval_jet2, evaluate, parse, to_string

e = parse("x1^2 * x2 + sin(x2) - ln(1 + x1^2)", 2)
print("parsed:", to_string(e))

x = np.array([1.5, 0.3])
j = eval_jet2(e, x)
print("value:", j.value)
print("gradient:", j.grad)
print("Hessian:\n", j.hess)

# compare with central differences of plain evaluations
h = 1e-5
fd = np.array([(evaluate(e, x + h * d) - evaluate(e, x - h * d)) / (2 * h) for d in np.eye(2)])
print("finite-difference gradient:", fd)

# unary minus binds looser than ^, exponents are literals
print("-x1^2 at x1 = 3:", evaluate(parse("-x1^2", 1), [3.0]))
print("x1^3^2 parses as", to_string(parse("x1^3^2", 1)))
