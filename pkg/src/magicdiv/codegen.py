"""Straight-line code snippets and magic-number tables.

Snippets use a small C-like pseudo-syntax with ``mulhi`` as a named
primitive. :func:`execute_snippet` parses one back and runs it on checked
N-bit registers, which is how the tests confirm that what we print is what
:func:`magicdiv.magic.divide_general` computes.
"""

from __future__ import annotations

import ast
import csv
import io
import json
import re
from dataclasses import dataclass

from magicdiv.magic import MagicParams, is_power_of_two, precompute_magic
from magicdiv.nbits import RegisterValue, checked_add, checked_sub, mulhi, shr

FLAVORS = ("general", "bounded", "shift-only")
BOUNDED_PRECONDITION = "requires n < 2^(N-1)"
TABLE_FIELDS = ("d", "p", "m_lo_dec", "m_lo_hex", "pow2", "m_full")


def hex_word(value: int, width: int) -> str:
    """Hex literal zero-padded to ``ceil(width / 4)`` digits."""
    return f"0x{value:0{(width + 3) // 4}x}"


@dataclass(frozen=True)
class CodeSnippet:
    width: int
    divisor: int
    flavor: str
    header_comment: str
    lines: tuple[str, ...]

    def render(self) -> str:
        return "\n".join((self.header_comment, *self.lines)) + "\n"


def render_snippet(params: MagicParams, flavor: str = "general") -> CodeSnippet:
    if flavor not in FLAVORS:
        raise ValueError(f"unknown snippet flavor {flavor!r}")
    n_bits, d, p = params.width, params.d, params.p
    magic = hex_word(params.m_lo, n_bits)
    header = f"// N={n_bits} d={d} p={p} m_lo={params.m_lo} ({magic})"
    if flavor == "general":
        lines = (
            f"q = mulhi({magic}, n);",
            f"h = min({p}, 1);",
            "t = (n - q) >> h;",
            "t = t + q;",
            f"t = t >> ({p} - h);",
            "return t;",
        )
    elif flavor == "bounded":
        header += f" {BOUNDED_PRECONDITION}, i.e. n < 2^{n_bits - 1}"
        lines = (
            f"q = mulhi({magic}, n);",
            f"t = (n + q) >> {p};",
            "return t;",
        )
    else:
        if not is_power_of_two(params.divisor):
            raise ValueError(f"shift-only snippet needs a power-of-two divisor, got {d}")
        lines = (f"t = n >> {p};", "return t;")
    return CodeSnippet(n_bits, d, flavor, header, lines)


_ASSIGN = re.compile(r"^\s*([A-Za-z_]\w*)\s*=\s*(.+?);\s*$")
_RETURN = re.compile(r"^\s*return\s+([A-Za-z_]\w*)\s*;\s*$")


def execute_snippet(snippet: CodeSnippet | str, n: int, width: int | None = None) -> int:
    """Run snippet text on checked ``width``-bit registers with input ``n``.

    Integer literals become registers, except where an operand is a shift
    amount or an argument of ``min``; those stay plain integers.
    """
    if isinstance(snippet, CodeSnippet):
        width = snippet.width
        text = snippet.render()
    else:
        text = snippet
        if width is None:
            raise ValueError("width is required for raw snippet text")
    env: dict[str, object] = {"n": RegisterValue(width, n)}
    for line in text.splitlines():
        if not line.strip() or line.lstrip().startswith("//"):
            continue
        if m := _RETURN.match(line):
            return _as_register(env[m.group(1)], width).value
        m = _ASSIGN.match(line)
        if m is None:
            raise SyntaxError(f"unrecognised snippet line: {line!r}")
        expr = ast.parse(m.group(2), mode="eval").body
        env[m.group(1)] = _eval(expr, env, width)
    raise SyntaxError("snippet has no return statement")


def _as_register(value, width: int) -> RegisterValue:
    if isinstance(value, RegisterValue):
        return value
    return RegisterValue(width, value)


def _as_int(value) -> int:
    return value.value if isinstance(value, RegisterValue) else value


def _eval(node, env, width):
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return node.value
    if isinstance(node, ast.Name):
        return env[node.id]
    if isinstance(node, ast.BinOp):
        left = _eval(node.left, env, width)
        right = _eval(node.right, env, width)
        if isinstance(node.op, ast.RShift):
            return shr(_as_register(left, width), _as_int(right))
        if isinstance(left, int) and isinstance(right, int):
            # shift-amount arithmetic such as (p - h)
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Add):
                return left + right
        if isinstance(node.op, ast.Add):
            return checked_add(_as_register(left, width), _as_register(right, width))
        if isinstance(node.op, ast.Sub):
            return checked_sub(_as_register(left, width), _as_register(right, width))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
        args = [_eval(a, env, width) for a in node.args]
        if node.func.id == "mulhi" and len(args) == 2:
            return mulhi(*(_as_register(a, width) for a in args))
        if node.func.id == "min" and len(args) == 2:
            return min(_as_int(a) for a in args)
    raise SyntaxError(f"unsupported snippet expression: {ast.dump(node)}")


# -- magic-number tables -----------------------------------------------------


@dataclass(frozen=True)
class MagicTableRow:
    d: int
    p: int
    m_lo: int
    m_lo_hex: str
    pow2: bool
    m_full: int

    def as_record(self) -> dict:
        return {
            "d": str(self.d),
            "p": str(self.p),
            "m_lo_dec": str(self.m_lo),
            "m_lo_hex": self.m_lo_hex,
            "pow2": "1" if self.pow2 else "0",
            "m_full": str(self.m_full),
        }


def magic_row(width: int, d: int) -> MagicTableRow:
    params = precompute_magic(width, d)
    return MagicTableRow(
        d=d,
        p=params.p,
        m_lo=params.m_lo,
        m_lo_hex=hex_word(params.m_lo, width),
        pow2=is_power_of_two(params.divisor),
        m_full=params.full_magic,
    )


def magic_table(width: int, divisors) -> list[MagicTableRow]:
    return [magic_row(width, d) for d in divisors]


def table_to_csv(rows: list[MagicTableRow]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=TABLE_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.as_record())
    return buf.getvalue()


def table_to_json(width: int, rows: list[MagicTableRow]) -> str:
    return json.dumps({"width": width, "rows": [r.as_record() for r in rows]}, indent=2) + "\n"


def parse_table(text: str, width: int) -> list[MagicParams]:
    """Rebuild :class:`MagicParams` from CSV or JSON table output."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        records = json.loads(stripped)["rows"]
    else:
        records = list(csv.DictReader(io.StringIO(text)))
    out = []
    for rec in records:
        out.append(MagicParams(
            width=width,
            divisor=RegisterValue(width, int(rec["d"])),
            shift_offset=int(rec["p"]),
            magic_lo=RegisterValue(width, int(rec["m_lo_dec"])),
        ))
    return out
