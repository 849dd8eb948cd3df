"""Plain-text certificate files.

    VDW-CERT v1
    N <int>
    k <int>
    r <int>
    seed <uint64|->
    params <single line of free text>
    attempts <int>
    colors
    <N integers in 1..r, any whitespace / line wrapping>
    verdict VERIFIED|UNVERIFIED

UTF-8, LF line endings.  Re-verification trusts only N, k, r and the colors.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .groups import cyclic
from .progressions import APWitness, Coloring, find_mono_ap

MAGIC = "VDW-CERT v1"
WRAP = 30


class CertificateError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class Certificate:
    N: int
    k: int
    r: int
    seed: int | None
    params: str
    attempts: int
    colors: tuple[int, ...]
    verdict: str = "UNVERIFIED"

    def coloring(self) -> Coloring:
        return Coloring(cyclic(self.N), self.r, self.colors)

    def verify(self, workers: int | None = None) -> APWitness | None:
        return find_mono_ap(self.coloring(), self.k, workers=workers)

    def dumps(self) -> str:
        if "\n" in self.params or "\r" in self.params:
            raise ValueError("params must fit on one line")
        lines = [
            MAGIC,
            f"N {self.N}",
            f"k {self.k}",
            f"r {self.r}",
            f"seed {'-' if self.seed is None else self.seed}",
            f"params {self.params}".rstrip(),
            f"attempts {self.attempts}",
            "colors",
        ]
        for i in range(0, len(self.colors), WRAP):
            lines.append(" ".join(map(str, self.colors[i:i + WRAP])))
        lines.append(f"verdict {self.verdict}")
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        Path(path).write_bytes(self.dumps().encode("utf-8"))


def _int_field(line: str, lineno: int, key: str, minimum: int = 0) -> int:
    name, _, value = line.partition(" ")
    if name != key:
        raise CertificateError(f"expected '{key} <int>', got {line!r}", lineno)
    try:
        v = int(value)
    except ValueError:
        raise CertificateError(f"{key} is not an integer: {value!r}", lineno) from None
    if v < minimum:
        raise CertificateError(f"{key} must be >= {minimum}", lineno)
    return v


def loads(text: str) -> Certificate:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if any(l.endswith("\r") for l in lines):
        bad = next(i for i, l in enumerate(lines, 1) if l.endswith("\r"))
        raise CertificateError("CRLF line ending", bad)

    def get(i: int) -> str:
        if i >= len(lines):
            raise CertificateError("unexpected end of file", i + 1)
        return lines[i]

    if get(0) != MAGIC:
        raise CertificateError(f"expected {MAGIC!r}", 1)
    N = _int_field(get(1), 2, "N", 1)
    k = _int_field(get(2), 3, "k", 2)
    r = _int_field(get(3), 4, "r", 1)
    name, _, value = get(4).partition(" ")
    if name != "seed":
        raise CertificateError("expected 'seed <uint64|->'", 5)
    if value == "-":
        seed = None
    else:
        try:
            seed = int(value)
        except ValueError:
            raise CertificateError(f"bad seed {value!r}", 5) from None
        if not 0 <= seed < 2**64:
            raise CertificateError("seed outside uint64", 5)
    line = get(5)
    if not (line == "params" or line.startswith("params ")):
        raise CertificateError("expected 'params <text>'", 6)
    params = line[7:]
    attempts = _int_field(get(6), 7, "attempts", 0)
    if get(7) != "colors":
        raise CertificateError("expected 'colors'", 8)
    colors: list[int] = []
    i = 8
    while True:
        line = get(i)
        if line.startswith("verdict"):
            break
        for tok in line.split():
            try:
                c = int(tok)
            except ValueError:
                raise CertificateError(f"bad color {tok!r}", i + 1) from None
            if not 1 <= c <= r:
                raise CertificateError(f"color {c} outside 1..{r}", i + 1)
            colors.append(c)
        i += 1
    if len(colors) != N:
        raise CertificateError(f"expected {N} colors, found {len(colors)}", i + 1)
    name, _, verdict = line.partition(" ")
    if verdict not in ("VERIFIED", "UNVERIFIED"):
        raise CertificateError(f"bad verdict {verdict!r}", i + 1)
    if i + 1 != len(lines):
        raise CertificateError("trailing content after verdict", i + 2)
    return Certificate(N, k, r, seed, params, attempts, tuple(colors), verdict)


def load(path) -> Certificate:
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise CertificateError("not UTF-8", raw[: e.start].count(b"\n") + 1) from None
    return loads(text)
