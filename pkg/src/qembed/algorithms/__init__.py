"""Reference quantum algorithms, each runnable through a ``demo`` entry point."""

from . import bernstein_vazirani, deutsch_jozsa, grover, microscope, simon

DEMOS = {
    "dj": deutsch_jozsa.demo,
    "simon": simon.demo,
    "bv": bernstein_vazirani.demo,
    "grover": grover.demo,
    "younes": grover.demo_younes,
    "microscope": microscope.demo,
}
