#!/usr/bin/env python3
"""Convert the space-separated Statlog german.data file to a headed CSV.

Usage: german_credit_csv.py german.data > german_credit.csv
"""
import csv
import sys

COLUMNS = [
    "checking_status", "duration", "credit_history", "purpose", "credit_amount",
    "savings", "employment", "installment_rate", "personal_status", "other_debtors",
    "residence_since", "property", "age", "other_installment_plans", "housing",
    "existing_credits", "job", "dependents", "telephone", "foreign_worker", "credit_risk",
]


def main() -> None:
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(COLUMNS)
    with open(sys.argv[1]) as f:
        for line_no, line in enumerate(f, 1):
            fields = line.split()
            if not fields:
                continue
            if len(fields) != len(COLUMNS):
                sys.exit(f"line {line_no}: expected {len(COLUMNS)} fields, got {len(fields)}")
            out.writerow(fields)


if __name__ == "__main__":
    main()
