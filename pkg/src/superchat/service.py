"""HTTP inference service: decode endpoint, render debug endpoint, health.

The loaded checkpoint is immutable; every request is stateless and
identical requests produce identical responses. All 4xx/5xx bodies are
{"error": message}.
"""

import json
from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from .checkpoint import checkpoint_fingerprint
from .corpus import Vocabulary, normalize
from .decode import (
    _make_predict_fn,
    decode_greedy,
    beam_core,
    trace_for_classes,
)
from .errors import CapacityError, SuperChatError
from .glyphs import GlyphSource
from .layout import LayoutConfig
from .network import ModelCheckpoint
from .render import png_bytes, render


@dataclass(frozen=True)
class ServiceRuntime:
    """Everything a request needs, loaded once and never mutated."""

    checkpoint: ModelCheckpoint
    vocab: Vocabulary
    layout: LayoutConfig
    glyphs: GlyphSource
    model_id: str

    @classmethod
    def build(cls, checkpoint, vocab, layout, glyphs) -> "ServiceRuntime":
        return cls(
            checkpoint=checkpoint,
            vocab=vocab,
            layout=layout,
            glyphs=glyphs,
            model_id=checkpoint_fingerprint(checkpoint),
        )


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def _steps_payload(steps, vocab: Vocabulary) -> list[dict]:
    return [
        {
            "position": s.position,
            "char": vocab.char_of(s.chosen_class),
            "probability": s.probability,
            "top5": [
                {"char": vocab.char_of(c), "probability": p} for c, p in s.top_k
            ],
        }
        for s in steps
    ]


def create_app(runtime: ServiceRuntime | None, ui_dir=None) -> FastAPI:
    """Build the service app. runtime=None serves 503s until a model exists."""
    app = FastAPI()
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.runtime = runtime

    @app.get("/healthz")
    def healthz():
        rt = app.state.runtime
        if rt is None:
            return _error(503, "model not loaded")
        return {"status": "ok", "model_id": rt.model_id}

    @app.post("/chat")
    async def chat(request: Request):
        rt = app.state.runtime
        if rt is None:
            return _error(503, "model not loaded")
        try:
            body = json.loads(await request.body())
        except (json.JSONDecodeError, UnicodeDecodeError):
            return _error(400, "malformed JSON body")
        if not isinstance(body, dict) or not isinstance(body.get("text"), str):
            return _error(400, "body must be a JSON object with a string 'text'")
        beam_width = body.get("beam_width", 1)
        if not isinstance(beam_width, int) or isinstance(beam_width, bool) or beam_width < 1:
            return _error(400, "beam_width must be an integer >= 1")
        trace = bool(body.get("trace", False))

        text = normalize(body["text"])
        if not text:
            return _error(400, "text is empty after normalization")
        if len(text) > rt.layout.input_capacity:
            return _error(
                400,
                f"input exceeds capacity: {len(text)} chars > "
                f"{rt.layout.input_capacity}",
            )

        if beam_width == 1:
            response_text, steps = decode_greedy(
                rt.checkpoint, rt.vocab, rt.layout, rt.glyphs, text
            )
        else:
            predict = _make_predict_fn(rt.checkpoint, rt.vocab, rt.layout, rt.glyphs, text)
            beam = beam_core(
                predict,
                rt.vocab.eos_index,
                rt.vocab.size,
                rt.layout.response_capacity,
                beam_width,
            )
            best = beam[0]
            response_text = "".join(rt.vocab.char_of(c) for c in best.text_classes())
            steps = trace_for_classes(predict, best.partial) if trace else []

        payload = {"response": response_text, "model_id": rt.model_id}
        if trace:
            payload["steps"] = _steps_payload(steps, rt.vocab)
        return payload

    @app.get("/render")
    def render_endpoint(input: str = "", partial: str = ""):
        rt = app.state.runtime
        if rt is None:
            return _error(503, "model not loaded")
        try:
            image = render(rt.layout, rt.glyphs, input, partial)
        except CapacityError as exc:
            return _error(400, str(exc))
        return Response(content=png_bytes(image), media_type="image/png")

    @app.exception_handler(SuperChatError)
    async def on_superchat_error(request: Request, exc: SuperChatError):
        return _error(400, str(exc))

    @app.exception_handler(Exception)
    async def on_error(request: Request, exc: Exception):
        return _error(500, f"internal error: {exc}")

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
