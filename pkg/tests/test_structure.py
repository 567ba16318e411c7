"""PDB parsing, quality filtering, and superposition oracles."""

import math

import numpy as np
import pytest

from dtibench.errors import ParseError
from dtibench.rng import generator
from dtibench.structure import (
    ProteinStructure,
    StructureSource,
    kabsch_superpose,
    pairwise_rmsd,
    parse_pdb_ca,
    quality_filter,
    rmsd_refined,
)


def atom_line(serial, resname, chain, resseq, x, y, z, bfac=50.0, name=" CA ",
              altloc=" ", icode=" "):
    return (
        f"ATOM  {serial:5d} {name}{altloc}{resname} {chain}{resseq:4d}{icode}   "
        f"{x:8.3f}{y:8.3f}{z:8.3f}{1.00:6.2f}{bfac:6.2f}          "
        f" C  "
    )


def write_pdb(path, lines):
    path.write_text("\n".join(lines) + "\n")


def rotation_matrix(ax, ay, az):
    cx, sx = math.cos(ax), math.sin(ax)
    cy, sy = math.cos(ay), math.sin(ay)
    cz, sz = math.cos(az), math.sin(az)
    rx = np.array([[1, 0, 0], [0, cx, -sx], [0, sx, cx]])
    ry = np.array([[cy, 0, sy], [0, 1, 0], [-sy, 0, cy]])
    rz = np.array([[cz, -sz, 0], [sz, cz, 0], [0, 0, 1]])
    return rz @ ry @ rx


def brute_force_min_rmsd(P, Q, steps=18, refine_rounds=6):
    """Min RMSD over rotations via a coarse Euler grid plus local shrinkage."""
    Pc = P - P.mean(axis=0)
    Qc = Q - Q.mean(axis=0)

    def rmsd_at(angles):
        R = rotation_matrix(*angles)
        diff = Pc @ R.T - Qc
        return math.sqrt((diff ** 2).sum() / len(P))

    grid = np.linspace(0.0, 2 * math.pi, steps, endpoint=False)
    best = None
    best_angles = None
    for ax in grid:
        for ay in grid:
            for az in grid:
                val = rmsd_at((ax, ay, az))
                if best is None or val < best:
                    best, best_angles = val, (ax, ay, az)

    # walk to a local optimum at each resolution, then halve the step
    step = 2 * math.pi / steps / 2
    for _ in range(refine_rounds):
        improved = True
        while improved:
            improved = False
            for d0 in (-step, 0.0, step):
                for d1 in (-step, 0.0, step):
                    for d2 in (-step, 0.0, step):
                        angles = (best_angles[0] + d0, best_angles[1] + d1,
                                  best_angles[2] + d2)
                        val = rmsd_at(angles)
                        if val < best - 1e-15:
                            best, best_angles = val, angles
                            improved = True
        step /= 2.0
    return best


def test_rigid_transform_gives_zero_rmsd():
    rng = generator(0, "kabsch-rigid")
    for _ in range(10):
        P = rng.normal(size=(8, 3))
        R = rotation_matrix(*rng.uniform(0, 2 * math.pi, 3))
        t = rng.normal(size=3)
        Q = P @ R.T + t
        sup = kabsch_superpose(P, Q)
        assert sup.rmsd < 1e-9
        assert not sup.degenerate
        assert np.allclose(sup.apply(P), Q, atol=1e-9)


def test_kabsch_matches_brute_force_rotation_search():
    rng = generator(1, "kabsch-brute")
    for _ in range(5):
        P = rng.normal(size=(4, 3))
        Q = rng.normal(size=(4, 3))
        sup = kabsch_superpose(P, Q)
        assert sup.rmsd == pytest.approx(brute_force_min_rmsd(P, Q), abs=1e-3)


def test_mirror_image_is_not_superposable():
    # chiral 4-point set; reflections are excluded so rmsd stays positive
    P = np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])
    Q = P.copy()
    Q[:, 2] *= -1
    sup = kabsch_superpose(P, Q)
    assert sup.rmsd > 0.1
    assert sup.rmsd == pytest.approx(brute_force_min_rmsd(P, Q), abs=1e-3)


def test_collinear_segment_closed_form():
    # third point on the centroid keeps the sets degenerate but solvable:
    # optimal rotation is the identity and rmsd has a closed form
    P = np.array([[-1.0, 0, 0], [1.0, 0, 0], [0.0, 0, 0]])
    Q = np.array([[-0.5, 0, 0], [0.5, 0, 0], [0.0, 0, 0]])
    sup = kabsch_superpose(P, Q)
    assert sup.degenerate
    assert sup.rmsd == pytest.approx(math.sqrt((0.25 + 0.25) / 3), abs=1e-12)


def test_parse_pdb_fixed_columns(tmp_path):
    path = tmp_path / "mini.pdb"
    write_pdb(path, [
        "HEADER    TEST PROTEIN",
        "EXPDTA    X-RAY DIFFRACTION",
        "REMARK   2 RESOLUTION.    1.80 ANGSTROMS.",
        atom_line(1, "MET", "A", 1, 1.0, 2.0, 3.0),
        atom_line(2, "LYS", "A", 2, 4.0, 5.0, 6.0),
        atom_line(3, "CYS", "A", 3, 7.0, 8.0, 9.0, name=" CB "),
        atom_line(4, "ALA", "B", 1, 0.0, 0.0, 0.0),
    ])
    s = parse_pdb_ca(path)
    assert s.protein_id == "mini"
    assert s.sequence == "MK"
    assert s.chain == "A"
    assert np.allclose(s.coords, [[1, 2, 3], [4, 5, 6]])
    assert s.source is StructureSource.XRAY
    assert s.quality == pytest.approx(1.80)


def test_parse_pdb_altloc_and_first_model(tmp_path):
    path = tmp_path / "alt.pdb"
    write_pdb(path, [
        "MODEL        1",
        atom_line(1, "GLY", "A", 1, 0.0, 0.0, 0.0, altloc="A"),
        atom_line(2, "GLY", "A", 1, 9.0, 9.0, 9.0, altloc="B"),
        atom_line(3, "SER", "A", 2, 1.0, 1.0, 1.0),
        "ENDMDL",
        "MODEL        2",
        atom_line(4, "GLY", "A", 1, 5.0, 5.0, 5.0),
        "ENDMDL",
    ])
    s = parse_pdb_ca(path)
    assert s.sequence == "GS"
    assert np.allclose(s.coords[0], [0, 0, 0])


def test_parse_pdb_alphafold_plddt(tmp_path):
    path = tmp_path / "af.pdb"
    write_pdb(path, [
        "TITLE     ALPHAFOLD MONOMER V2.0 PREDICTION FOR TEST",
        atom_line(1, "ALA", "A", 1, 0.0, 0.0, 0.0, bfac=90.0),
        atom_line(2, "GLY", "A", 2, 1.0, 0.0, 0.0, bfac=70.0),
    ])
    s = parse_pdb_ca(path)
    assert s.source is StructureSource.ALPHAFOLD
    assert s.quality == pytest.approx(80.0)


def test_parse_pdb_bad_coordinates(tmp_path):
    path = tmp_path / "bad.pdb"
    line = atom_line(1, "ALA", "A", 1, 0.0, 0.0, 0.0)
    write_pdb(path, [line[:30] + "xxxxxxxx" + line[38:]])
    with pytest.raises(ParseError) as exc:
        parse_pdb_ca(path)
    assert exc.value.line == 1


def test_parse_pdb_without_ca_atoms(tmp_path):
    path = tmp_path / "noca.pdb"
    write_pdb(path, [atom_line(1, "ALA", "A", 1, 0.0, 0.0, 0.0, name=" CB ")])
    with pytest.raises(ParseError):
        parse_pdb_ca(path)


def make_structure(pid, n=6, seed=0, source=None, quality=None):
    rng = generator(seed, "structure", pid)
    seq = "".join("ACDEFGHIKLMNPQRSTVWY"[i] for i in rng.integers(0, 20, n))
    coords = rng.normal(size=(n, 3)) * 3.0
    return ProteinStructure(protein_id=pid, sequence=seq, coords=coords,
                            source=source, quality=quality)


def test_quality_filter_thresholds():
    xray_good = make_structure("a", source=StructureSource.XRAY, quality=1.9)
    xray_bad = make_structure("b", source=StructureSource.XRAY, quality=2.0)
    af_good = make_structure("c", source=StructureSource.ALPHAFOLD, quality=70.5)
    af_bad = make_structure("d", source=StructureSource.ALPHAFOLD, quality=70.0)
    unknown = make_structure("e")
    kept, report = quality_filter([xray_good, xray_bad, af_good, af_bad, unknown])
    assert [s.protein_id for s in kept] == ["a", "c"]
    reasons = dict(report.rejected)
    assert set(reasons) == {"b", "d", "e"}
    assert reasons["e"] == "unknown-quality"


def test_rmsd_refined_drops_outlier_pairs():
    rng = generator(3, "refine")
    n = 30
    seq = "".join("ACDEFGHIKLMNPQRSTVWY"[i] for i in rng.integers(0, 20, n))
    coords = rng.normal(size=(n, 3)) * 5.0
    moved = coords.copy()
    R = rotation_matrix(0.3, -0.2, 0.9)
    moved = moved @ R.T + np.array([1.0, 2.0, 3.0])
    moved[5] += 40.0  # one outlier residue
    a = ProteinStructure(protein_id="a", sequence=seq, coords=coords)
    b = ProteinStructure(protein_id="b", sequence=seq, coords=moved)
    assert rmsd_refined(a, b) < 0.5


def test_pairwise_rmsd_symmetric_with_na(tmp_path, caplog):
    a = make_structure("a", n=10, seed=1)
    b = make_structure("b", n=10, seed=2)
    stub = ProteinStructure(protein_id="c", sequence="W",
                            coords=np.zeros((1, 3)))
    with caplog.at_level("WARNING"):
        m = pairwise_rmsd([b, a, stub])
    assert m.ids == ("a", "b", "c")
    assert m.values[0, 0] == 0.0
    assert m.values[0, 1] == m.values[1, 0]
    assert np.isnan(m.values[0, 2]) and np.isnan(m.values[2, 1])


def test_pairwise_rmsd_cache_roundtrip(tmp_path):
    a = make_structure("a", n=10, seed=1)
    b = make_structure("b", n=10, seed=2)
    cache = tmp_path / "rmsd.tsv"
    first = pairwise_rmsd([a, b], cache_path=cache)
    assert cache.exists()
    text_before = cache.read_text()
    second = pairwise_rmsd([a, b], cache_path=cache)
    assert np.array_equal(first.values, second.values)
    assert cache.read_text() == text_before
