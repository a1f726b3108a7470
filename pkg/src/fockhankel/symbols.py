"""Symbols f: C -> C and their small text grammar.

Grammar (whitespace between tokens is ignored)::

    expr    := "xia" | "poly(" clist ")" | "conj(" expr ")"
             | "radial(nu=" int ", g=" gtag ")" | "indicator(" real ")"
    gtag    := "invr_outside(" real ")" | "power(" real ")" | "indicator(" real ")"
    clist   := complex ("," complex)*
    complex := a | a+bi | a-bi

``xia`` is the piecewise symbol 1/z on |z| >= 1 and 0 inside the unit disk.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import SymbolParseError, UnsupportedSymbolError


def _fmt_real(x):
    x = float(x)
    return repr(int(x)) if x.is_integer() and abs(x) < 1e15 else repr(x)


def _fmt_complex(c):
    c = complex(c)
    if c.imag == 0:
        return _fmt_real(c.real)
    sign = "+" if c.imag >= 0 else "-"
    return f"{_fmt_real(c.real)}{sign}{_fmt_real(abs(c.imag))}i"


# -- radial profiles ---------------------------------------------------------

@dataclass(frozen=True)
class RadialProfile:
    """Radial factor g(rho) of a single-frequency symbol."""

    tag: str
    param: float
    conjugated: bool = False

    def __post_init__(self):
        if self.tag not in _PROFILES:
            raise UnsupportedSymbolError(f"unknown radial profile {self.tag!r}")
        if self.tag in ("invr_outside", "indicator") and not self.param > 0:
            raise UnsupportedSymbolError(f"{self.tag} needs a positive cut radius")

    def __call__(self, rho):
        val = _PROFILES[self.tag](np.asarray(rho, dtype=float), self.param)
        # every registered profile is real, so conjugation is the identity
        return val

    def conj(self):
        return RadialProfile(self.tag, self.param, not self.conjugated)

    @property
    def break_radii(self):
        return (self.param,) if self.tag in ("invr_outside", "indicator") else ()

    @property
    def bounded(self):
        if self.tag == "power":
            return self.param == 0
        return True

    def text(self):
        return f"{self.tag}({_fmt_real(self.param)})"


def _invr_outside(rho, c):
    out = np.zeros_like(rho)
    mask = rho >= c
    out[mask] = 1.0 / rho[mask]
    return out


def _power(rho, p):
    with np.errstate(divide="ignore"):
        return np.power(rho, p)


def _indicator(rho, c):
    return (rho < c).astype(float)


_PROFILES = {"invr_outside": _invr_outside, "power": _power, "indicator": _indicator}


# -- symbols -----------------------------------------------------------------

class Symbol:
    """Base class.  Subclasses are immutable and evaluate vectorised."""

    break_radii: tuple = ()
    bounded: bool = True

    def __call__(self, z):
        raise NotImplementedError

    def eval(self, z):
        return self(z)

    def conj(self):
        return Conjugate(self)

    def single_frequency(self):
        """``(nu, g)`` with f(rho e^{it}) = e^{i nu t} g(rho), or None."""
        return None

    def break_circles(self):
        return tuple((0j, r) for r in self.break_radii)

    @property
    def degree(self):
        """Largest |angular frequency| of a polynomial-like symbol (for truncations)."""
        sf = self.single_frequency()
        return abs(sf[0]) if sf else 0

    def text(self):
        raise UnsupportedSymbolError(f"{type(self).__name__} has no text form")

    def __str__(self):
        try:
            return self.text()
        except UnsupportedSymbolError:
            return repr(self)


@dataclass(frozen=True)
class SingleFrequency(Symbol):
    nu: int
    g: RadialProfile
    name: str = ""

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        rho = np.abs(z)
        g = self.g(rho)
        # componentwise division stays finite for subnormal |z|
        safe = np.where(rho > 0, rho, 1.0)
        unit = np.where(rho > 0, z.real / safe + 1j * (z.imag / safe), 1.0)
        return g * unit**self.nu

    @property
    def break_radii(self):
        return self.g.break_radii

    @property
    def bounded(self):
        return self.g.bounded

    def single_frequency(self):
        return self.nu, self.g

    def text(self):
        if self.name:
            return self.name
        return f"radial(nu={self.nu}, g={self.g.text()})"


@dataclass(frozen=True)
class Polynomial(Symbol):
    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs)
        if not coeffs:
            raise UnsupportedSymbolError("polynomial needs at least one coefficient")
        object.__setattr__(self, "coeffs", coeffs)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for c in reversed(self.coeffs):
            out = out * z + c
        return out

    @property
    def nonzero(self):
        return [j for j, c in enumerate(self.coeffs) if c != 0]

    @property
    def bounded(self):
        return max(self.nonzero, default=0) == 0

    @property
    def degree(self):
        return max(self.nonzero, default=0)

    def single_frequency(self):
        nz = self.nonzero
        if not nz:
            return 0, _MonomialProfile(0, 0j)
        if len(nz) != 1:
            return None
        j = nz[0]
        return j, _MonomialProfile(j, self.coeffs[j])

    def text(self):
        return "poly(" + ",".join(_fmt_complex(c) for c in self.coeffs) + ")"


@dataclass(frozen=True)
class _MonomialProfile:
    """g(rho) = c rho^j for a one-term polynomial."""

    j: int
    c: complex
    conjugated: bool = False

    def __call__(self, rho):
        c = self.c.conjugate() if self.conjugated else self.c
        val = c * np.power(np.asarray(rho, dtype=float), self.j)
        return val.real if c.imag == 0 else val

    def conj(self):
        return _MonomialProfile(self.j, self.c, not self.conjugated)

    break_radii = ()
    bounded = False


@dataclass(frozen=True)
class Conjugate(Symbol):
    inner: Symbol

    def __call__(self, z):
        return np.conj(self.inner(z))

    @property
    def break_radii(self):
        return self.inner.break_radii

    def break_circles(self):
        return self.inner.break_circles()

    @property
    def bounded(self):
        return self.inner.bounded

    @property
    def degree(self):
        return self.inner.degree

    def single_frequency(self):
        sf = self.inner.single_frequency()
        if sf is None:
            return None
        nu, g = sf
        return -nu, g.conj()

    def text(self):
        return f"conj({self.inner.text()})"


@dataclass(frozen=True)
class Indicator(Symbol):
    """Indicator of the disk |z| < c."""

    c: float

    def __call__(self, z):
        return (np.abs(np.asarray(z, dtype=complex)) < self.c).astype(complex)

    @property
    def break_radii(self):
        return (self.c,)

    def single_frequency(self):
        return 0, RadialProfile("indicator", self.c)

    def text(self):
        return f"indicator({_fmt_real(self.c)})"


@dataclass(frozen=True, eq=False)
class General(Symbol):
    """Arbitrary vectorised callable with declared break circles."""

    fn: object
    circles: tuple = ()
    is_bounded: bool = False
    label: str = "general"

    def __call__(self, z):
        return np.asarray(self.fn(np.asarray(z, dtype=complex)), dtype=complex)

    @property
    def bounded(self):
        return self.is_bounded

    def break_circles(self):
        return tuple(self.circles)

    @property
    def break_radii(self):
        return tuple(r for c, r in self.circles if c == 0)


def translated(f, lam):
    """The symbol w -> f(w + lam); break circles move to centre -lam."""
    lam = complex(lam)
    circles = tuple((c - lam, r) for c, r in f.break_circles())
    return General(lambda w: f(w + lam), circles, f.bounded, f"{f}@{_fmt_complex(lam)}")


def xia():
    return SingleFrequency(-1, RadialProfile("invr_outside", 1.0), name="xia")


def frequency_of(s):
    sf = s.single_frequency()
    return None if sf is None else sf[0]


# -- parser ------------------------------------------------------------------

_UNUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_NUM = rf"[+-]?{_UNUM}"
_FULL = re.compile(rf"\s*(?P<a>{_NUM})(?P<s>[+-])(?P<b>{_UNUM})?i\s*")
_PURE = re.compile(rf"\s*(?P<p>[+-]?(?:{_UNUM})?)i\s*")
_REAL = re.compile(rf"\s*({_NUM})\s*")
_INT = re.compile(r"\s*([+-]?\d+)\s*")


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise SymbolParseError(msg, self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def accept(self, lit):
        self.skip()
        if self.text.startswith(lit, self.pos):
            self.pos += len(lit)
            return True
        return False

    def expect(self, lit):
        if not self.accept(lit):
            self.error(f"expected {lit!r}")

    def real(self):
        m = _REAL.match(self.text, self.pos)
        if not m:
            self.error("expected a real number")
        self.pos = m.end()
        return float(m.group(1))

    def integer(self):
        m = _INT.match(self.text, self.pos)
        if not m:
            self.error("expected an integer")
        self.pos = m.end()
        return int(m.group(1))

    def complex_(self):
        m = _FULL.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            b = float(m.group("b")) if m.group("b") else 1.0
            return complex(float(m.group("a")), b if m.group("s") == "+" else -b)
        m = _PURE.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            p = m.group("p")
            return complex(0.0, float(p + "1" if p in ("", "+", "-") else p))
        m = _REAL.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            return complex(float(m.group(1)), 0.0)
        self.error("expected a complex literal")

    def gtag(self):
        self.skip()
        m = re.compile(r"[a-z_]+").match(self.text, self.pos)
        if not m:
            self.error("expected a radial profile tag")
        tag = m.group(0)
        if tag not in _PROFILES:
            raise UnsupportedSymbolError(f"unknown radial profile {tag!r} at position {self.pos}")
        self.pos = m.end()
        self.expect("(")
        param = self.real()
        self.expect(")")
        return RadialProfile(tag, param)

    def expr(self):
        self.skip()
        if self.accept("xia"):
            return xia()
        if self.accept("poly("):
            coeffs = [self.complex_()]
            while self.accept(","):
                coeffs.append(self.complex_())
            self.expect(")")
            return Polynomial(tuple(coeffs))
        if self.accept("conj("):
            inner = self.expr()
            self.expect(")")
            return Conjugate(inner)
        if self.accept("radial("):
            self.expect("nu")
            self.expect("=")
            nu = self.integer()
            self.expect(",")
            self.expect("g")
            self.expect("=")
            g = self.gtag()
            self.expect(")")
            return SingleFrequency(nu, g)
        if self.accept("indicator("):
            c = self.real()
            self.expect(")")
            if not c > 0:
                raise UnsupportedSymbolError("indicator radius must be positive")
            return Indicator(c)
        self.error("unknown symbol")

    def parse(self):
        s = self.expr()
        self.skip()
        if self.pos != len(self.text):
            self.error("trailing characters")
        return s


def parse_symbol(text):
    """Parse the symbol grammar; raises :class:`SymbolParseError` with position."""
    return _Parser(text).parse()
