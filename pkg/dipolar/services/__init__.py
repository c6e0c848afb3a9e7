"""Services: energy routing, closed-form ansatz, phase analysis, gradient flow, verification and output."""
