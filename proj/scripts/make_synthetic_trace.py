#!/usr/bin/env python3
"""Regenerates tests/data/synthetic_hpc.swf.

Produces a deterministic SWF trace whose job-size and runtime mix resembles a
mid-sized HPC batch log: bursty arrivals, power-law processor counts, a tail of
long runtimes, a handful of sub-5-minute jobs and a few records with -1
sentinels so parser edge paths stay exercised.
"""
import random
import os

OUT = os.path.join(os.path.dirname(__file__), "..", "tests", "data", "synthetic_hpc.swf")

rng = random.Random(424242)

PROC_CHOICES = [1, 2, 4, 8, 16, 32, 64]
PROC_WEIGHTS = [30, 20, 18, 14, 10, 5, 3]

N_JOBS = 950

lines = [
    "; Version: 2.2",
    "; Computer: synthetic 8-way cluster",
    "; Generated by scripts/make_synthetic_trace.py (deterministic seed)",
    "; MaxJobs: %d" % N_JOBS,
]

submit = 0
for job_id in range(1, N_JOBS + 1):
    # bursty arrivals: 20% of jobs share the previous submit time
    if job_id > 1 and rng.random() < 0.20:
        pass
    else:
        submit += int(rng.expovariate(1.0 / 55.0)) + 1
    wait = 0 if rng.random() < 0.5 else int(rng.expovariate(1.0 / 900.0))

    u = rng.random()
    if u < 0.01:
        run = -1  # unknown runtime, must be skipped
    elif u < 0.09:
        run = rng.randint(30, 299)  # below the short-job cutoff
    else:
        run = min(50000, max(300, int(rng.lognormvariate(8.0, 1.1))))

    procs = rng.choices(PROC_CHOICES, weights=PROC_WEIGHTS)[0]
    req_procs = procs
    if rng.random() < 0.02:
        procs = -1  # allocated count missing, requested count still usable
    if job_id in (97, 403):
        procs, req_procs = -1, -1  # both missing, record is unusable

    cpu = run * 0.9 if run > 0 else -1
    req_time = int(run * 1.2) if run > 0 else 3600
    uid = rng.randint(1, 40)
    gid = rng.randint(1, 8)
    exe = rng.randint(1, 25)
    queue = rng.randint(1, 3)

    lines.append(
        "%d %d %d %d %d %.1f -1 %d %d -1 1 %d %d %d %d 1 -1 -1"
        % (job_id, submit, wait, run, procs, cpu, req_procs, req_time, uid, gid, exe, queue)
    )

with open(OUT, "w", newline="\n") as f:
    f.write("\n".join(lines) + "\n")
print("wrote %s (%d jobs)" % (OUT, N_JOBS))
