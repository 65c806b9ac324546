#!/usr/bin/env python3
"""Regenerates the committed test fixtures raw200.jsonl and user2-sample.jsonl.

Kept separate from the C++ code on purpose: the ingest tests compare the
parser's output against straightforward recounts of these files.
"""
import json
import random
import os

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(HERE, "..", "fixtures")

FIRST = ["alice", "ben", "carla", "daniel", "emma", "felix", "grace", "henry"]
LAST = ["smith", "brown", "castro", "duarte", "evans", "fischer"]
WORDS = ("march science photo picnic meeting trip beach lunch report draft "
         "slides budget trail concert recipe garden flight hotel museum "
         "library match game review notes agenda summary").split()
PLACES = ["Washington", "Campos", "Athens", "Lisbon", "Student Center"]


def person(rng, with_email=None):
    first = rng.choice(FIRST)
    last = rng.choice(LAST)
    name = f"{first.capitalize()} {last.capitalize()}"
    if with_email is None:
        with_email = rng.random() < 0.5
    if with_email:
        return f"{name} <{first}.{last}@example.com>"
    return name


def words(rng, lo, hi):
    return " ".join(rng.choice(WORDS) for _ in range(rng.randint(lo, hi)))


def iso_date(rng, with_time=False):
    y = rng.randint(2014, 2018)
    m = rng.randint(1, 12)
    d = rng.randint(1, 28)
    if with_time:
        return f"{y:04d}-{m:02d}-{d:02d}T{rng.randint(0,23):02d}:{rng.randint(0,59):02d}"
    return f"{y:04d}-{m:02d}-{d:02d}"


def us_date(rng, with_time=False):
    y = rng.randint(2014, 2018)
    m = rng.randint(1, 12)
    d = rng.randint(1, 28)
    if with_time:
        return f"{m:02d}/{d:02d}/{y:04d} {rng.randint(0,23):02d}:{rng.randint(0,59):02d}"
    return f"{m:02d}/{d:02d}/{y:04d}"


def gmail_record(rng, i):
    fields = [
        ["from", person(rng, True)],
        ["to", [person(rng, True) for _ in range(rng.randint(1, 3))]],
        ["subject", words(rng, 2, 6)],
        ["body", words(rng, 8, 30)],
        ["date", us_date(rng, rng.random() < 0.5)],
    ]
    if rng.random() < 0.3:
        fields.append(["labels", rng.choice(["inbox", "work", "travel"])])
    return {"source": "gmail", "id": f"gm-{i}", "fields": fields}


def facebook_record(rng, i):
    fields = [
        ["type", rng.choice(["Facebook post", "Facebook photo", "Facebook comment"])],
        ["message", words(rng, 4, 20)],
        ["tagged", [person(rng, False) for _ in range(rng.randint(1, 3))]],
        ["created_time", iso_date(rng, True)],
    ]
    if rng.random() < 0.2:
        fields.append(["place", rng.choice(PLACES)])
    if rng.random() < 0.4:
        fields.append(["story", words(rng, 3, 8)])
    return {"source": "facebook", "id": f"fb-{i}", "fields": fields}


def twitter_record(rng, i):
    fields = [
        ["type", "tweet"],
        ["text", words(rng, 4, 14)],
        ["author", person(rng, False)],
        ["created_at", iso_date(rng, True)],
    ]
    if rng.random() < 0.3:
        fields.append(["mentions", [person(rng, False) for _ in range(rng.randint(1, 2))]])
    return {"source": "twitter", "id": f"tw-{i}", "fields": fields}


def calendar_record(rng, i):
    fields = [
        ["kind", "calendar event"],
        ["summary", words(rng, 2, 5)],
        ["organizer", person(rng, True)],
        ["attendees", [person(rng, True) for _ in range(rng.randint(1, 4))]],
        ["start", iso_date(rng, True)],
        ["end", iso_date(rng, True)],
    ]
    if rng.random() < 0.3:
        fields.append(["location", rng.choice(PLACES)])
    return {"source": "calendar", "id": f"cal-{i}", "fields": fields}


def dropbox_record(rng, i):
    fields = [
        ["kind", "file"],
        ["name", words(rng, 1, 3) + ".pdf"],
        ["path", "/docs/" + rng.choice(WORDS)],
        ["modified", iso_date(rng) + f" {rng.randint(0,23):02d}:{rng.randint(0,59):02d}"],
    ]
    if rng.random() < 0.4:
        fields.append(["shared_with", [person(rng, True)]])
    return {"source": "dropbox", "id": f"dbx-{i}", "fields": fields}


def make_raw200():
    rng = random.Random(20170422)
    makers = [gmail_record, facebook_record, twitter_record, calendar_record,
              dropbox_record]
    records = [makers[i % len(makers)](rng, i) for i in range(200)]
    with open(os.path.join(FIXTURES, "raw200.jsonl"), "w") as f:
        for r in records:
            f.write(json.dumps(r) + "\n")


def canonical_object(rng, i):
    source = rng.choice(["facebook", "gmail", "twitter", "calendar", "dropbox"])
    obj = {"id": f"u2-{i:04d}", "source": source}
    obj["what"] = [words(rng, 4, 18)] if rng.random() < 0.99 else []
    who = []
    if rng.random() < 0.97:
        for k in range(rng.randint(1, 4)):
            first = rng.choice(FIRST)
            last = rng.choice(LAST)
            entry = {"name": f"{first.capitalize()} {last.capitalize()}",
                     "emails": [], "role": "from" if k == 0 else "to",
                     "weight": 1.0}
            if rng.random() < 0.5:
                entry["emails"] = [f"{first}.{last}@example.com"]
            who.append(entry)
    obj["who"] = who
    obj["when"] = [iso_date(rng, rng.random() < 0.3)] if rng.random() < 0.95 else []
    obj["where"] = [{"text": rng.choice(PLACES)}] if rng.random() < 0.05 else []
    obj["why"] = []
    obj["how"] = [{"facebook": "post", "gmail": "email", "twitter": "tweet",
                   "calendar": "event", "dropbox": "file"}[source]]
    return obj


def make_user2_sample():
    rng = random.Random(16738)
    with open(os.path.join(FIXTURES, "user2-sample.jsonl"), "w") as f:
        for i in range(500):
            f.write(json.dumps(canonical_object(rng, i)) + "\n")


if __name__ == "__main__":
    make_raw200()
    make_user2_sample()
    print("fixtures written to", FIXTURES)
