"""
The transfer experiment from a config file
==========================================

``run_experiment`` repeats leapfrog training for several seeds, evaluates
each trained network zero-shot on the test instances and writes
``results.csv``, ``training_curves.csv`` and ``plot_data.dat``. The same
thing is available as ``relgrl bench <config>``.

Plot with gnuplot, e.g.::

    plot for [i=0:3] 'plot_data.dat' index i using 1:2:3 with yerrorbars title columnhead(1)
"""

import tempfile
from pathlib import Path

from relgrl.harness import parse_config, run_experiment

CONFIG = """
domain = sysadmin
stages = 3;4;6
stage_episodes = 200     # 1250 for the full protocol
test_instances = 10;15
runs = 3                 # 10 for the full protocol
eval_episodes = 50
"""

cfg = parse_config(CONFIG)
cfg.output_dir = Path(tempfile.mkdtemp(prefix="grl_"))
result = run_experiment(cfg)
print("files in", cfg.output_dir)
print(result.files["results"].read_text().splitlines()[0])
