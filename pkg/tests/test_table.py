"""Permutation-table structure: orbit-derived entry counts, disk caching,
and identity-only restriction."""
import numpy as np

from pamc.library import cxx
from pamc.partition import quick_partition
from pamc.synthesis import (DiskCache, SynthesisConfig, SynthesisStats,
                            resynthesize_block)
from pamc.topology import enumerate_subtopologies

CFG = SynthesisConfig(seed=0)
PATHS = [s for s in enumerate_subtopologies(3) if len(s.edges) == 2]


def _block():
    pc = quick_partition(cxx(), 3)
    assert len(pc.blocks) == 1
    return pc.blocks[0]


def test_paths_only_table_counts():
    st = SynthesisStats()
    table = resynthesize_block(_block(), PATHS, CFG, stats=st)
    entries = table.block_entries(0)
    assert len(entries) == 108  # 3 sub-topologies x 36 permutation pairs
    assert st.direct_syntheses <= 18
    assert all(np.isfinite(e.cnot_count) for e in entries.values())


def test_identity_only_table():
    st = SynthesisStats()
    table = resynthesize_block(_block(), PATHS, CFG, stats=st,
                               identity_only=True)
    entries = table.block_entries(0)
    assert len(entries) == 3  # one identity-pair entry per sub-topology
    assert all(k[1] == (0, 1, 2) and k[2] == (0, 1, 2) for k in entries)


def test_disk_cache_roundtrip(tmp_path):
    cache = DiskCache(str(tmp_path))
    st1 = SynthesisStats()
    resynthesize_block(_block(), PATHS, CFG, stats=st1, cache=cache)
    assert st1.cache_hits == 0
    st2 = SynthesisStats()
    resynthesize_block(_block(), PATHS, CFG, stats=st2, cache=cache)
    assert st2.direct_syntheses == 0
    assert st2.cache_hits > 0
