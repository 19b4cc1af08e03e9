# coding: utf-8
"""
Dump the default configuration to a json file.

usage: dump_hparams_to_json.py [options] <output_json_path>

options:
    --set=<kv>               Override one key before dumping, e.g. epsilon=0.25.
    -h, --help               Show help message.
"""
from docopt import docopt

import sys
import json

from gaussmix_filter.hparams import default_hparams

if __name__ == "__main__":
    args = docopt(__doc__)
    output_json_path = args["<output_json_path>"]

    hparams = default_hparams()
    overrides = args["--set"]
    if overrides:
        hparams.parse_overrides([overrides])

    with open(output_json_path, "w") as f:
        json.dump(hparams.values(), f, indent=2, sort_keys=True)
        f.write("\n")
    sys.exit(0)
