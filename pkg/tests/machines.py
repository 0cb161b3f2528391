from __future__ import annotations

import itertools
from collections.abc import Iterator

from vass_forge.tm import TuringMachine


def even_length() -> TuringMachine:
    """Accepts words over {a, b} of even length; two working states."""
    return TuringMachine(
        states=("e", "o", "yes", "no"),
        sigma=("a", "b"),
        blank="_",
        delta=(
            ("e", "a", "a", "R", "o"),
            ("e", "b", "b", "R", "o"),
            ("o", "a", "a", "R", "e"),
            ("o", "b", "b", "R", "e"),
            ("e", "_", "_", "S", "yes"),
            ("o", "_", "_", "S", "no"),
        ),
        initial="e",
        accept="yes",
        reject="no",
    )


def contains_b() -> TuringMachine:
    """Accepts words over {a, b} containing at least one b."""
    return TuringMachine(
        states=("s", "yes", "no"),
        sigma=("a", "b"),
        blank="_",
        delta=(
            ("s", "a", "a", "R", "s"),
            ("s", "b", "b", "S", "yes"),
            ("s", "_", "_", "S", "no"),
        ),
        initial="s",
        accept="yes",
        reject="no",
    )


def mod_three() -> TuringMachine:
    """Accepts unary words whose length is divisible by three."""
    return TuringMachine(
        states=("m0", "m1", "m2", "yes", "no"),
        sigma=("a",),
        blank="_",
        delta=(
            ("m0", "a", "a", "R", "m1"),
            ("m1", "a", "a", "R", "m2"),
            ("m2", "a", "a", "R", "m0"),
            ("m0", "_", "_", "S", "yes"),
            ("m1", "_", "_", "S", "no"),
            ("m2", "_", "_", "S", "no"),
        ),
        initial="m0",
        accept="yes",
        reject="no",
    )


def bouncer() -> TuringMachine:
    """Accepts everything: scans right, then returns left flipping a/b.

    Exercises left moves and rewriting, which the three corpus machines
    never perform.
    """
    return TuringMachine(
        states=("fwd", "bck", "yes", "no"),
        sigma=("a", "b"),
        blank="_",
        delta=(
            ("fwd", "a", "a", "R", "fwd"),
            ("fwd", "b", "b", "R", "fwd"),
            ("fwd", "_", "_", "L", "bck"),
            ("bck", "a", "b", "L", "bck"),
            ("bck", "b", "a", "L", "bck"),
            ("bck", "_", "_", "S", "yes"),
        ),
        initial="fwd",
        accept="yes",
        reject="no",
    )


CORPUS = (
    ("even-length", even_length),
    ("contains-b", contains_b),
    ("mod-three", mod_three),
)


def words(sigma: tuple[str, ...], max_len: int) -> Iterator[str]:
    for n in range(max_len + 1):
        for p in itertools.product(sigma, repeat=n):
            yield "".join(p)
