"""Ingesting an accident CSV and categorizing records by operator.

The parser expects a Socrata-style export: header row, comma delimited,
double-quote escaping. Column names are configurable; the defaults match
the public aviation crash dataset (Operator / Summary / Date). Each record
is then tagged military, commercial, private, or unknown using
case-insensitive keyword rules over the operator field, with precedence
military > private > commercial so strings like "Private charter - Army
contract" land on the military side.
"""
from collections import Counter

import topicforge
from topicforge.ingest import (
    CategoryRules,
    categorize_operator,
    categorize_records,
    parse_records,
    partition_by_category,
)

records = parse_records(topicforge.data_path())
print(f"parsed {len(records)} records from the bundled sample CSV")

first = records[0]
print(f"\nfirst record: id={first.record_id} date={first.date}")
print(f"  operator : {first.operator_raw}")
print(f"  narrative: {first.narrative[:90]}...")

records = categorize_records(records)
print("\ncategory counts:", dict(Counter(r.category.value for r in records)))

buckets = partition_by_category(records)
for category, bucket in buckets.items():
    ops = sorted({r.operator_raw for r in bucket})[:3]
    print(f"  {category.value:>10}: {len(bucket):2d} records, e.g. {ops}")

# the rules are plain data, so domain-specific keyword sets are easy to swap in
rules = CategoryRules(military_keywords=("luftwaffe", "navy"), private_keywords=("private",))
print("\ncustom rules:", categorize_operator("Luftwaffe transport wing", rules).value)
