"""
dynbarrier engine modules.

This package contains the core logic used by the dynbarrier CLI:
- static rectangular barrier (closed form, opaque limit, amplitude matching)
- finite channel spectrum of the modulated barrier and its density of states
- per-channel and total transmission
- quantized traversal times (exact, low- and high-frequency forms)
- Bessel sideband baseline for comparison
- wave-packet propagation oracle
- run-config ingestion, table builders and CSV/JSON/SVG writers
"""
