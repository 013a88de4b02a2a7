"""Engine selection: compiled kernel when available, pure Python otherwise.

The two implementations are bit-identical by construction (counter-based
clock draws, same event order), so the choice only affects speed.  Set
COMPILED to see which one was picked; make_engine(force=...) pins one for
benchmarks and cross-checks.
"""

from ._engine_py import PyEngineCore

try:
    from ._kernel import CyEngineCore

    COMPILED = True
except ImportError:  # pragma: no cover - depends on the build environment
    CyEngineCore = None
    COMPILED = False

EngineCore = CyEngineCore if COMPILED else PyEngineCore


def make_engine(*args, force="auto", **kwargs):
    """Construct an engine core.  force is "auto", "python", or "compiled"."""
    if force == "auto":
        return EngineCore(*args, **kwargs)
    if force == "python":
        return PyEngineCore(*args, **kwargs)
    if force == "compiled":
        if CyEngineCore is None:
            raise RuntimeError("compiled kernel is not available")
        return CyEngineCore(*args, **kwargs)
    raise ValueError(f"unknown engine choice: {force!r}")
