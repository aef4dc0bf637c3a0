"""The wire-protocol HTTP server.

 - GET  /info      -> {"num_labels": K, "label_names": [...]}
 - POST /classify  {"texts": [...]} -> {"probabilities": [[K floats], ...]}
 - POST /encode    {"texts": [...]} -> {"vectors": [[d floats], ...]}

Rows come back in request order. Every error — malformed body, missing
backend, internal failure — answers with a non-2xx status and a JSON body
of the shape {"error": "..."}. Handlers are stateless: they read the loaded
weights and never mutate them, so concurrent and repeated requests are
independent.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException


class RequestFault(Exception):
    """A client-side protocol violation, answered with a 4xx."""

    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


async def _texts_field(request: Request) -> list[str]:
    body = await request.body()
    try:
        payload = json.loads(body)
    except (json.JSONDecodeError, UnicodeDecodeError):
        raise RequestFault(400, "request body is not valid JSON") from None
    if not isinstance(payload, dict):
        raise RequestFault(400, "request body must be a JSON object")
    if "texts" not in payload:
        raise RequestFault(400, 'request body is missing "texts"')
    texts = payload["texts"]
    if not isinstance(texts, list):
        raise RequestFault(400, '"texts" must be a list of strings')
    for i, text in enumerate(texts):
        if not isinstance(text, str):
            raise RequestFault(400, f'"texts"[{i}] must be a string')
    return texts


def build_app(classifier=None, encoder=None) -> FastAPI:
    """Assemble the app around a classifier and/or an encoder backend.

    A classifier backend carries num_labels, label_names, and
    classify(texts) -> probability rows; an encoder backend carries
    encode(texts) -> vector rows. Either may be absent, in which case its
    routes answer 404 with an {"error": ...} body.
    """
    app = FastAPI(title="victim-service", docs_url=None, redoc_url=None, openapi_url=None)

    @app.exception_handler(RequestFault)
    async def _fault(request: Request, exc: RequestFault):
        return JSONResponse({"error": exc.message}, status_code=exc.status)

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(request: Request, exc: StarletteHTTPException):
        return JSONResponse({"error": str(exc.detail)}, status_code=exc.status_code)

    @app.exception_handler(Exception)
    async def _internal_error(request: Request, exc: Exception):
        return JSONResponse({"error": f"internal error: {exc}"}, status_code=500)

    @app.get("/info")
    async def info():
        if classifier is None:
            raise RequestFault(404, "no classifier is configured")
        return {"num_labels": classifier.num_labels, "label_names": classifier.label_names}

    @app.post("/classify")
    async def classify(request: Request):
        if classifier is None:
            raise RequestFault(404, "no classifier is configured")
        texts = await _texts_field(request)
        return {"probabilities": classifier.classify(texts)}

    @app.post("/encode")
    async def encode(request: Request):
        if encoder is None:
            raise RequestFault(404, "no encoder is configured")
        texts = await _texts_field(request)
        return {"vectors": encoder.encode(texts)}

    return app
