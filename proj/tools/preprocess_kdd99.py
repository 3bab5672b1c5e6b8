#!/usr/bin/env python3
"""Convert the KDDCUP99 10-percent file into a numeric CSV for ganen.

Categorical columns are one-hot encoded against fixed category lists, giving
122 features. Records labelled "normal." become the anomaly class (label 1);
every attack record is normal (label 0).

    python3 tools/preprocess_kdd99.py kddcup.data_10_percent.gz kdd99.csv
"""

import argparse
import csv
import gzip
import sys

PROTOCOLS = ["icmp", "tcp", "udp"]
SERVICES = [
    "IRC", "X11", "Z39_50", "aol", "auth", "bgp", "courier", "csnet_ns", "ctf", "daytime",
    "discard", "domain", "domain_u", "echo", "eco_i", "ecr_i", "efs", "exec", "finger", "ftp",
    "ftp_data", "gopher", "harvest", "hostnames", "http", "http_2784", "http_443", "http_8001",
    "imap4", "iso_tsap", "klogin", "kshell", "ldap", "link", "login", "mtp", "name",
    "netbios_dgm", "netbios_ns", "netbios_ssn", "netstat", "nnsp", "nntp", "ntp_u", "other",
    "pm_dump", "pop_2", "pop_3", "printer", "private", "red_i", "remote_job", "rje", "shell",
    "smtp", "sql_net", "ssh", "sunrpc", "supdup", "systat", "telnet", "tftp_u", "tim_i", "time",
    "urh_i", "urp_i", "uucp", "uucp_path", "vmnet", "whois",
]
FLAGS = ["OTH", "REJ", "RSTO", "RSTOS0", "RSTR", "S0", "S1", "S2", "S3", "SF", "SH"]
CATEGORICAL = {1: ("protocol", PROTOCOLS), 2: ("service", SERVICES), 3: ("flag", FLAGS)}
FIELDS = 41


def header():
    names = []
    for col in range(FIELDS):
        if col in CATEGORICAL:
            prefix, values = CATEGORICAL[col]
            names += [f"{prefix}_{v}" for v in values]
        else:
            names.append(f"f{col}")
    return names + ["label"]


def convert(record, line):
    if len(record) != FIELDS + 1:
        sys.exit(f"line {line}: expected {FIELDS + 1} fields, got {len(record)}")
    row = []
    for col, value in enumerate(record[:FIELDS]):
        if col in CATEGORICAL:
            prefix, values = CATEGORICAL[col]
            if value not in values:
                sys.exit(f"line {line}: unknown {prefix} '{value}'")
            row += ["1" if v == value else "0" for v in values]
        else:
            row.append(value)
    row.append("1" if record[FIELDS].rstrip(".") == "normal" else "0")
    return row


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("input", help="kddcup.data_10_percent, optionally gzipped")
    parser.add_argument("output", help="numeric CSV with a 'label' column")
    args = parser.parse_args()
    opener = gzip.open if args.input.endswith(".gz") else open
    with opener(args.input, "rt", newline="") as src, open(args.output, "w", newline="") as dst:
        writer = csv.writer(dst)
        writer.writerow(header())
        for line, record in enumerate(csv.reader(src), start=1):
            if record:
                writer.writerow(convert(record, line))


if __name__ == "__main__":
    main()
