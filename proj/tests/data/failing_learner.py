#!/usr/bin/env python3
import json
import sys

for line in sys.stdin:
    sys.stdout.write(json.dumps({"error": "cannot fit"}) + "\n")
    sys.stdout.flush()
