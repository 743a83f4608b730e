"""Small shared helpers: number formatting, atomic file output, and a
restricted expression parser for command-line values."""

import ast
import cmath
import math
import os
import tempfile

import numpy as np


def fmt(x):
    """Round-trippable decimal text for a real number."""
    return format(float(x), ".17g")


def fsum_complex(values):
    """Compensated sum of a complex array."""
    values = np.asarray(values)
    return complex(math.fsum(values.real.tolist()), math.fsum(values.imag.tolist()))


def atomic_write(path, text):
    """Write `text` to `path` via a temporary file in the same directory."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", newline="\n", encoding="ascii") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


_NAMES = {"pi": math.pi, "i": 1j, "j": 1j, "e": math.e}
_FUNCS = {"sqrt": cmath.sqrt, "exp": cmath.exp, "cos": cmath.cos, "sin": cmath.sin}
_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
    ast.Pow: lambda a, b: a ** b,
}


def parse_number(text):
    """Evaluate an arithmetic expression such as ``pi/4``, ``i/sqrt(2)``
    or ``0.5-0.5i`` and return a complex value.

    Only numeric literals, ``+ - * / **``, the constants ``pi``, ``e``,
    ``i`` and the functions ``sqrt``, ``exp``, ``cos``, ``sin`` are allowed.
    """
    src = text.strip().replace("−", "-")
    # "0.5i" -> "0.5*i"
    out = []
    for k, ch in enumerate(src):
        if ch in "ij" and k > 0 and (src[k - 1].isdigit() or src[k - 1] == "."):
            out.append("*")
        out.append(ch)
    try:
        tree = ast.parse("".join(out), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse number {text!r}") from exc
    return complex(_eval(tree.body, text))


def _eval(node, text):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
        return node.value
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand, text)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval(node.left, text), _eval(node.right, text))
    if (
        isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id in _FUNCS
        and len(node.args) == 1
        and not node.keywords
    ):
        return _FUNCS[node.func.id](_eval(node.args[0], text))
    raise ValueError(f"unsupported expression {text!r}")


def parse_real(text):
    z = parse_number(text)
    if abs(z.imag) > 0:
        raise ValueError(f"expected a real value, got {text!r}")
    return z.real
