#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Wire-protocol stub answering 1.0 for every property, with fault injection."""

import argparse
import json
import os
import sys

UNITS = {
    "homo_ev": "eV", "lumo_ev": "eV", "gap_ev": "eV", "dipole_debye": "D",
    "st_gap_ev": "eV", "osc_strength": "dimensionless", "vee_ev": "eV",
    "docking_1syh": "kcal/mol", "docking_6y2f": "kcal/mol", "docking_4lde": "kcal/mol",
    "sascore": "dimensionless", "qed": "dimensionless", "logp": "dimensionless",
    "tpsa": "A^2", "alerts_pass": "dimensionless",
    "dE_act_kcal": "kcal/mol", "dE_rxn_kcal": "kcal/mol",
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--drop-every", type=int, default=0, help="skip every Nth response")
    ap.add_argument("--bad-units", action="store_true", help="tag every value with a wrong unit")
    ap.add_argument("--crash-after", type=int, default=0, help="exit after N responses")
    ap.add_argument("--crash-marker", default="", help="only crash while this file is absent; create it")
    ap.add_argument("--crash-on", default="", help="exit whenever this SMILES is requested")
    ap.add_argument("--no-handshake", action="store_true")
    ap.add_argument("--protocol", type=int, default=1)
    ap.add_argument("--error-on", default="", help="answer status error for this SMILES")
    ap.add_argument("--garbage-every", type=int, default=0, help="emit a junk line before every Nth response")
    args = ap.parse_args()

    out = sys.stdout
    if args.no_handshake:
        out.write("hello\n")
        out.flush()
    else:
        out.write(json.dumps({"protocol": args.protocol, "props": sorted(UNITS)}) + "\n")
        out.flush()

    crash_armed = args.crash_after > 0
    if crash_armed and args.crash_marker:
        crash_armed = not os.path.exists(args.crash_marker)

    served = 0
    for line in sys.stdin:
        req = json.loads(line)
        served += 1
        if args.crash_on and req["smiles"] == args.crash_on:
            sys.exit(3)
        if crash_armed and served > args.crash_after:
            if args.crash_marker:
                open(args.crash_marker, "w").close()
            sys.exit(2)
        if args.drop_every and served % args.drop_every == 0:
            continue
        if args.garbage_every and served % args.garbage_every == 0:
            out.write("not a response\n")
        if args.error_on and req["smiles"] == args.error_on:
            resp = {"id": req["id"], "status": "error", "values": {}, "error": "rejected"}
        else:
            values = {}
            for p in req["props"]:
                unit = "furlong" if args.bad_units else UNITS.get(p, "dimensionless")
                values[p] = {"v": 1.0, "u": unit}
            resp = {"id": req["id"], "status": "ok", "values": values}
        out.write(json.dumps(resp) + "\n")
        out.flush()


if __name__ == "__main__":
    main()
