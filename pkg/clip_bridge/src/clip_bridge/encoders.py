"""Text-encoder registry with lazy loading.

Real CLIP checkpoints need torch and transformers plus network or cached
weights; when any of that is missing the encoder reports itself
unavailable instead of crashing the export. Tests register deterministic
fakes through the same seam.
"""

from __future__ import annotations

import numpy as np


class EncoderUnavailable(RuntimeError):
    """Raised by a factory when its encoder cannot be loaded here."""


# the four text towers the exports are meant to cover
CLIP_CHECKPOINTS = {
    "clip-vit-b32": "openai/clip-vit-base-patch32",
    "clip-vit-b16": "openai/clip-vit-base-patch16",
    "clip-vit-l14": "openai/clip-vit-large-patch14",
    "clip-vit-h14": "laion/CLIP-ViT-H-14-laion2B-s32B-b79K",
}


class ClipTextEncoder:
    """Wraps a HF CLIP text tower.

    token level: mean of the input token embeddings of the bare term,
    special tokens excluded, so multi-token terms show their sub-word
    geometry. sentence level: the projected pooled output for a carrier
    sentence.
    """

    def __init__(self, checkpoint: str):
        try:
            import torch
            from transformers import CLIPTokenizerFast, CLIPTextModelWithProjection
        except ImportError as err:
            raise EncoderUnavailable(f"torch/transformers not installed: {err}") from None
        try:
            self.tokenizer = CLIPTokenizerFast.from_pretrained(checkpoint)
            self.model = CLIPTextModelWithProjection.from_pretrained(checkpoint)
        except Exception as err:
            raise EncoderUnavailable(f"cannot load {checkpoint}: {err}") from None
        self.model.eval()
        self._torch = torch

    def embed_token(self, term: str) -> np.ndarray:
        ids = self.tokenizer(term, add_special_tokens=False)["input_ids"]
        if not ids:
            raise ValueError(f"term {term!r} tokenized to nothing")
        table = self.model.text_model.embeddings.token_embedding
        with self._torch.no_grad():
            vecs = table(self._torch.tensor(ids))
        return vecs.mean(dim=0).cpu().numpy().astype(np.float32)

    def embed_sentence(self, text: str) -> np.ndarray:
        batch = self.tokenizer([text], padding=True, return_tensors="pt")
        with self._torch.no_grad():
            out = self.model(**batch)
        return out.text_embeds[0].cpu().numpy().astype(np.float32)


_REGISTRY = {
    encoder_id: (lambda ckpt=ckpt: ClipTextEncoder(ckpt))
    for encoder_id, ckpt in CLIP_CHECKPOINTS.items()
}


def register_encoder(encoder_id: str, factory) -> None:
    """Add or replace an encoder factory; factory() returns an object with
    embed_token and embed_sentence, or raises EncoderUnavailable."""
    _REGISTRY[encoder_id] = factory


def available_encoders() -> tuple:
    """Registered encoder ids, registration order."""
    return tuple(_REGISTRY)


def load_encoder(encoder_id: str):
    if encoder_id not in _REGISTRY:
        raise KeyError(
            f"unknown encoder {encoder_id!r}; registered: {', '.join(_REGISTRY)}"
        )
    return _REGISTRY[encoder_id]()
