#!/usr/bin/env python3
# Mock vocoder adapter.  Reads <dir>/<id>.melb for every id in the ids file
# and writes a 220 Hz sine of n_frames * hop samples to <dir>/<id>.wav.
#   mock_vocoder.py DIR IDS [--fail-id ID] [--exit CODE] [--short]
import argparse, math, os, struct, sys, wave

p = argparse.ArgumentParser()
p.add_argument("dir")
p.add_argument("ids")
p.add_argument("--fail-id", default=None)
p.add_argument("--exit", type=int, default=0)
p.add_argument("--short", action="store_true")
a = p.parse_args()

if a.exit:
    print("mock vocoder: forced failure", file=sys.stderr)
    sys.exit(a.exit)

for item in open(a.ids).read().split():
    if item == a.fail_id:
        print("mock vocoder: cannot render " + item, file=sys.stderr)
        sys.exit(3)
    with open(os.path.join(a.dir, item + ".melb"), "rb") as f:
        magic, n_frames, n_mels, sr, n_fft, win, hop = struct.unpack("<4s6I", f.read(28))
    assert magic == b"MELB"
    n = n_frames * hop // (4 if a.short else 1)
    frames = b"".join(struct.pack("<h", int(8000 * math.sin(2 * math.pi * 220 * i / sr)))
                      for i in range(n))
    with wave.open(os.path.join(a.dir, item + ".wav"), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(sr)
        w.writeframes(frames)
