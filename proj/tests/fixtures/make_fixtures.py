#!/usr/bin/env python3
"""Regenerates the test fixtures. The output is committed; run from anywhere.

Frames are written with numpy and Pillow only, so the C++ reader is checked
against an independent writer.
"""

import json
import pathlib
import struct

import numpy as np
from PIL import Image

ROOT = pathlib.Path(__file__).resolve().parent
MAJORS = ["biological", "human-created", "meteorological", "physical"]


def write_tlf(path, frames):
    frames = np.asarray(frames, dtype=np.uint8)
    f, h, w, c = frames.shape
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4I", h, w, c, f))
        fh.write(frames.tobytes(order="C"))


def write_png_dir(path, frames):
    path.mkdir(parents=True, exist_ok=True)
    for t, frame in enumerate(frames):
        Image.fromarray(np.asarray(frame, dtype=np.uint8), "RGB").save(
            path / f"{t:03d}.png")


def dumps(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False)


def write_jsonl(path, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(dumps(r) + "\n" for r in rows))


def synth_video(rng, frames, size, speed, occluder):
    """Drifting background plus a white block that wanders about."""
    h = w = size
    base = rng.integers(20, 60, size=3)
    out = np.zeros((frames, h, w, 3), dtype=np.int64)
    ys, xs = np.mgrid[0:h, 0:w]
    for t in range(frames):
        for ch in range(3):
            out[t, :, :, ch] = base[ch] + (ys + xs) + speed * t
        out[t] = np.clip(out[t], 0, 240)
        if occluder:
            side = int(rng.integers(2, 8))
            y0 = int(rng.integers(0, h - side))
            x0 = int(rng.integers(0, w - side))
            out[t, y0:y0 + side, x0:x0 + side, :] = 255
    return out.astype(np.uint8)


def bench_fixture():
    subs = ["plant growth", "building construction", "sunset", "ice melting"]
    prompts = [
        "Time-lapse of a bean sprouting from dark soil into a seedling",
        "Time-lapse of a brick tower rising floor by floor on a building site",
        "Time-lapse of the sun sinking below the sea as the sky turns orange",
        "Time-lapse of an ice cube melting into a puddle on a wooden table",
    ]
    entries = []
    for major, sub, prompt in zip(MAJORS, subs, prompts):
        pid = f"{major}-{sub.replace(' ', '-')}-0"
        entries.append({
            "prompt_id": pid,
            "prompt": prompt,
            "reference_video": f"reference/{pid}.mp4",
            "sub_category": sub,
            "major_category": major,
        })
    write_jsonl(ROOT / "bench" / "manifest.jsonl", entries)

    rng = np.random.default_rng(20240611)
    runs = ROOT / "runs"
    for model, speed in (("model-a", 24), ("model-b", 3)):
        for e in entries:
            for seed in range(3):
                video = synth_video(rng, 8, 20, speed, occluder=True)
                write_tlf(runs / model / e["prompt_id"] / f"seed_{seed}.tlf", video)

    # model-b: one seed stored as an image directory, one truncated file.
    first = entries[0]["prompt_id"]
    (runs / "model-b" / first / "seed_1.tlf").unlink()
    write_png_dir(runs / "model-b" / first / "seed_1",
                  synth_video(rng, 8, 20, 3, occluder=True))
    broken = runs / "model-b" / entries[2]["prompt_id"] / "seed_2.tlf"
    data = broken.read_bytes()
    broken.write_bytes(data[: 16 + 5 * 20 * 20 * 3])

    run_a = {
        "model_id": "model-a",
        "videos": {
            e["prompt_id"]: [f"model-a/{e['prompt_id']}/seed_{k}.tlf"
                             for k in range(3)]
            for e in entries
        },
    }
    (runs / "model-a.json").write_text(json.dumps(run_a, indent=2) + "\n")

    (ROOT / "bench" / "external.csv").write_text(
        "model_id,UMT-FVD,UMTScore\nmodel-a,210.5,2.81\nmodel-b,265.25,2.44\n")
    (ROOT / "bench" / "human.csv").write_text(
        "model_id,score\nmodel-a,3.9\nmodel-b,2.1\n")


def bench150_fixture():
    entries = []
    selection = ["# two hard prompts per sub-category"]
    for i in range(75):
        major = MAJORS[i % 4]
        sub = f"sub-{i:02d}"
        for j in range(3):
            pid = f"{major}-{sub}-{j}"
            entries.append({
                "prompt_id": pid,
                "prompt": f"Time-lapse number {j} for {sub}",
                "reference_video": f"reference/{pid}.mp4",
                "sub_category": sub,
                "major_category": major,
            })
            if j != 1:
                selection.append(pid)
    write_jsonl(ROOT / "bench150" / "manifest.jsonl", entries)
    (ROOT / "bench150" / "selection.txt").write_text("\n".join(selection) + "\n")


def curation_fixture():
    frames = np.zeros((40, 8, 8, 3), dtype=np.uint8)
    frames[:20] = (10, 20, 30)
    frames[20:] = (200, 180, 160)
    write_tlf(ROOT / "videos" / "two_scenes.tlf", frames)


def png_fixture():
    # Channel order check: pure red, green, blue pixels in a 1x3 strip.
    frames = np.zeros((2, 1, 3, 3), dtype=np.uint8)
    frames[:, 0, 0] = (255, 0, 0)
    frames[:, 0, 1] = (0, 255, 0)
    frames[:, 0, 2] = (0, 0, 255)
    frames[1] //= 2
    write_png_dir(ROOT / "videos" / "rgb_png", frames)


def golden_fixture():
    # 3 frames of 4x4; with a grid of 2 the sampled pixels are (1,1), (1,3),
    # (3,1), (3,3). A white pixel hides (1,1) in frame 1 and (3,3) in frame 2.
    frames = np.full((3, 4, 4, 3), 90, dtype=np.uint8)
    frames[1, 1, 1] = 255
    frames[2, 3, 3] = 255
    write_tlf(ROOT / "videos" / "tiny.tlf", frames)

    vis = []
    for t in range(3):
        row = []
        for gy in range(2):
            y = int((gy + 0.5) * 4 / 2)
            for gx in range(2):
                x = int((gx + 0.5) * 4 / 2)
                row.append(int(frames[t, y, x].sum()) < 250 * 3)
        vis.append(row)

    exchanges = [
        ("01_track",
         {"kind": "track", "request_id": "golden-1",
          "payload": {"video": "videos/tiny.tlf", "grid_size": 2}},
         {"request_id": "golden-1", "status": "ok",
          "body": {"frames": 3, "grid_size": 2, "points": 4, "vis": vis}}),
        ("02_caption_frame",
         {"kind": "caption", "request_id": "golden-2",
          "payload": {"task": "frame", "video": "videos/tiny.tlf",
                      "frame_index": 2}},
         {"request_id": "golden-2", "status": "ok", "body": {"text": "frame 2"}}),
        ("03_caption_summarize",
         {"kind": "caption", "request_id": "golden-3",
          "payload": {"task": "summarize",
                      "frames": [{"position": 0, "caption": "bare soil"},
                                 {"position": 7, "caption": "green shoot"}]}},
         {"request_id": "golden-3", "status": "ok",
          "body": {"text": "summary of 2 frames: [0] bare soil; [7] green shoot;"}}),
    ]
    golden = ROOT / "golden"
    golden.mkdir(parents=True, exist_ok=True)
    for name, req, res in exchanges:
        (golden / f"{name}.request.json").write_text(dumps(req))
        (golden / f"{name}.response.json").write_text(dumps(res))


if __name__ == "__main__":
    bench_fixture()
    bench150_fixture()
    curation_fixture()
    png_fixture()
    golden_fixture()
