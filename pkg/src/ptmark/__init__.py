"""Semantic-preserving Fourier-ring watermarking on a toy latent diffusion stack.

The pipeline embeds a ring pattern into the Fourier transform of the initial
sampling noise, generates with guided DDIM, and then re-aligns the generation
trajectory with the unwatermarked one by optimizing per-step null embeddings
(pivotal tuning).  Verification inverts an image back to its initial latent
and runs a non-central chi-squared test on the extracted ring message.
"""

__version__ = "0.1.0"
