#!/usr/bin/env python3
"""Export the first three VGG-16 blocks for the perceptual/style losses.

Writes a pickled {name: tensor} dict with torchvision's "features.<i>.weight"
and "features.<i>.bias" keys, readable by `feature_weights` in a training
config. Requires torch and torchvision (downloads the ImageNet weights).

    python3 tools/export_vgg16.py vgg16_features.pt
"""
import argparse

import torch
import torchvision

LAYERS = (0, 2, 5, 7, 10, 12, 14)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out", help="output file")
    args = ap.parse_args()

    model = torchvision.models.vgg16(weights=torchvision.models.VGG16_Weights.IMAGENET1K_V1)
    state = model.state_dict()
    weights = {}
    for i in LAYERS:
        for part in ("weight", "bias"):
            key = f"features.{i}.{part}"
            weights[key] = state[key].detach().float().contiguous()
    torch.save(weights, args.out)
    print(f"wrote {len(weights)} tensors to {args.out}")


if __name__ == "__main__":
    main()
