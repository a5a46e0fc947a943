#!/usr/bin/env python3
# Copyright (C) 2026 The f2f Authors
# SPDX-License-Identifier: Apache-2.0
"""HTTP sidecar serving LPIPS and CLIP for `--providers reference`.

    pip install torch lpips open_clip_torch pillow
    python tools/reference_metrics_server.py --port 8765

Wire format: docs/metrics.md.
"""
import argparse
import base64
import io
import json
import logging
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

log = logging.getLogger("f2f.metrics")


class Models:
    def __init__(self, clip_model="ViT-L-14", clip_weights="openai", device=None):
        import lpips
        import open_clip
        import torch

        self.torch = torch
        self.device = device or ("cuda" if torch.cuda.is_available() else "cpu")
        self.lpips = lpips.LPIPS(net="vgg").to(self.device).eval()
        self.clip, _, self.preprocess = open_clip.create_model_and_transforms(clip_model, pretrained=clip_weights)
        self.clip = self.clip.to(self.device).eval()
        self.tokenizer = open_clip.get_tokenizer(clip_model)

    def _tensor(self, img):
        import numpy as np

        a = np.asarray(img.convert("RGB"), dtype=np.float32) / 127.5 - 1.0
        return self.torch.from_numpy(a).permute(2, 0, 1).unsqueeze(0).to(self.device)

    def perceptual(self, a, b):
        with self.torch.no_grad():
            return float(self.lpips(self._tensor(a), self._tensor(b)).item())

    def embed_image(self, img):
        with self.torch.no_grad():
            x = self.preprocess(img.convert("RGB")).unsqueeze(0).to(self.device)
            return self.clip.encode_image(x)[0].float().cpu().tolist()

    def embed_text(self, text):
        with self.torch.no_grad():
            return self.clip.encode_text(self.tokenizer([text]).to(self.device))[0].float().cpu().tolist()


def decode(b64):
    from PIL import Image

    return Image.open(io.BytesIO(base64.b64decode(b64)))


def make_handler(models):
    routes = {
        "/perceptual": lambda j: {"distance": models.perceptual(decode(j["a"]), decode(j["b"]))},
        "/embed/image": lambda j: {"embedding": models.embed_image(decode(j["image"]))},
        "/embed/text": lambda j: {"embedding": models.embed_text(j["text"])},
    }

    class Handler(BaseHTTPRequestHandler):
        def do_POST(self):
            route = routes.get(self.path)
            if route is None:
                return self._reply(404, {"error": "unknown path"})
            try:
                body = json.loads(self.rfile.read(int(self.headers.get("Content-Length", 0))))
                out = route(body)
            except (KeyError, ValueError, OSError) as e:
                return self._reply(400, {"error": str(e)})
            except Exception as e:  # model failure
                log.exception("request failed")
                return self._reply(500, {"error": str(e)})
            self._reply(200, out)

        def _reply(self, status, obj):
            data = json.dumps(obj).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def log_message(self, fmt, *args):
            log.debug(fmt, *args)

    return Handler


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--host", default="127.0.0.1")
    ap.add_argument("--port", type=int, default=8765)
    ap.add_argument("--clip-model", default="ViT-L-14")
    ap.add_argument("--clip-weights", default="openai")
    ap.add_argument("--device")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
    models = Models(args.clip_model, args.clip_weights, args.device)
    server = ThreadingHTTPServer((args.host, args.port), make_handler(models))
    log.info("serving on %s:%d (%s)", args.host, args.port, models.device)
    server.serve_forever()


if __name__ == "__main__":
    main()
