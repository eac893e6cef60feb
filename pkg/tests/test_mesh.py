import io
import math

import numpy as np
import pytest

from hwopsip.mesh import (
    Family,
    MeshFamily,
    boundary_faces,
    from_triangles,
    generate,
    grid_points,
    mesh_size,
    read_mesh,
    write_mesh,
)

FAMILIES = list(Family)


@pytest.fixture(scope="module", params=[(f, n) for f in FAMILIES for n in (2, 8, 32)],
                ids=lambda p: f"{p[0].value}-{p[1]}")
def mesh(request):
    fam, n = request.param
    if fam is Family.SHISHKIN and n == 2:
        # tau = ln(2)/32 < 1, still valid
        pass
    return generate(MeshFamily(fam, n))


def test_counts(mesh):
    N = mesh.family.N
    assert mesh.n_elements == 2 * N * N
    assert mesh.n_faces == 2 * N * (N + 1) + N * N
    assert len(boundary_faces(mesh)) == 4 * N


def test_positive_areas_sum_to_one(mesh):
    assert np.all(mesh.areas > 0)
    assert mesh.areas.sum() == pytest.approx(1.0, abs=1e-13)


def test_interior_faces_shared_with_opposite_signs(mesh):
    interior = ~mesh.is_boundary_face
    left, right = mesh.face_elements[interior].T
    assert np.all(left < right)
    faces = np.flatnonzero(interior)
    for f, a, b in zip(faces[:200], left[:200], right[:200]):
        sa = mesh.element_signs[a][mesh.element_faces[a] == f]
        sb = mesh.element_signs[b][mesh.element_faces[b] == f]
        assert sa == 1.0 and sb == -1.0
    counts = np.bincount(mesh.element_faces.ravel(), minlength=mesh.n_faces)
    assert np.all(counts[interior] == 2) and np.all(counts[~interior] == 1)


def test_normals_outward(mesh):
    centroid = mesh.element_coords().mean(axis=1)
    mid = mesh.vertices[mesh.face_vertices].mean(axis=1)
    for k in range(3):
        f = mesh.element_faces[:, k]
        n = mesh.element_signs[:, k, None] * mesh.normals[f]
        assert np.all(((mid[f] - centroid) * n).sum(axis=1) > 0)
    np.testing.assert_allclose(np.linalg.norm(mesh.normals, axis=1), 1.0, rtol=1e-14)


def test_boundary_faces_on_square_boundary(mesh):
    ends = mesh.vertices[mesh.face_vertices[boundary_faces(mesh)]]
    on = np.isclose(ends, 0.0, atol=0) | np.isclose(ends, 1.0, atol=0)
    both = on[:, 0, :] & on[:, 1, :]
    assert np.all(both[:, 0] | both[:, 1])


def test_local_face_opposite_vertex(mesh):
    tri = mesh.triangles
    fv = mesh.face_vertices[mesh.element_faces]
    for k in range(3):
        assert not np.any(fv[:, k, 0] == tri[:, k])
        assert not np.any(fv[:, k, 1] == tri[:, k])


@pytest.mark.parametrize("fam", FAMILIES)
def test_grid_monotone(fam):
    x1, x2 = grid_points(MeshFamily(fam, 32))
    assert np.all(np.diff(x1) > 0) and np.all(np.diff(x2) > 0)
    assert x2[0] == 0.0 and x2[-1] == pytest.approx(1.0, abs=1e-15)


def test_standard_n2():
    m = generate(MeshFamily("standard", 2))
    assert m.n_elements == 8 and m.n_faces == 16
    assert set(np.unique(m.vertices)) == {0.0, 0.5, 1.0}
    assert len(boundary_faces(m)) == 8


def test_shishkin_grid():
    fam = MeshFamily("shishkin", 32, 1 / 128)
    assert fam.tau == pytest.approx(4 / 128 * math.log(32))
    assert fam.tau == pytest.approx(0.108304, abs=5e-7)
    _, x2 = grid_points(fam)
    np.testing.assert_allclose(np.diff(x2[:17]), 2 * fam.tau / 32, rtol=1e-12)
    np.testing.assert_allclose(np.diff(x2[16:]), 2 * (1 - fam.tau) / 32, rtol=1e-12)


def test_grid_formulas_bit_exact():
    N = 16
    i = np.arange(N + 1)
    _, x2 = grid_points(MeshFamily("cosine", N))
    assert np.array_equal(x2, 0.5 * (1 - np.cos(i * np.pi / N)))
    _, x2 = grid_points(MeshFamily("quadratic", N))
    assert np.array_equal(x2, (i / N) ** 2)


def test_shishkin_rejects_odd_and_large_tau():
    with pytest.raises(ValueError):
        MeshFamily("shishkin", 33)
    with pytest.raises(ValueError):
        MeshFamily("shishkin", 32, delta=0.1)
    with pytest.raises(ValueError):
        MeshFamily("standard", 0)


@pytest.mark.parametrize("fam,N,expected", [
    ("standard", 32, 4.42e-02), ("shishkin", 32, 6.39e-02),
    ("cosine", 32, 5.81e-02), ("quadratic", 32, 6.90e-02),
])
def test_mesh_size_table_values(fam, N, expected):
    h = mesh_size(generate(MeshFamily(fam, N)))
    assert float(f"{h:.2e}") == expected


def test_standard_mesh_size_is_cell_diagonal():
    assert mesh_size(generate(MeshFamily("standard", 32))) == pytest.approx(math.sqrt(2) / 32)


def test_family_parse_aliases():
    assert Family.parse("IV") is Family.QUADRATIC
    assert Family.parse("Shishkin") is Family.SHISHKIN
    with pytest.raises(ValueError):
        Family.parse("delaunay")


def test_export_roundtrip():
    m = generate(MeshFamily("shishkin", 4))
    buf = io.StringIO()
    write_mesh(m, buf)
    text = buf.getvalue()
    lines = text.splitlines()
    assert lines[0] == f"{m.n_elements} {m.n_vertices} {m.n_faces}"
    assert len(lines) == 1 + m.n_vertices + m.n_elements + m.n_faces
    # boundary marker
    assert any(line.endswith(" -1") for line in lines[-m.n_faces:])
    m2 = read_mesh(io.StringIO(text))
    assert np.array_equal(m2.vertices, m.vertices)
    assert np.array_equal(m2.triangles, m.triangles)
    assert np.array_equal(m2.face_elements, m.face_elements)


def test_nonconformal_rejected():
    verts = [(0, 0), (1, 0), (0, 1), (1, 1), (0.5, 0.5)]
    # three triangles on one edge
    tris = [(0, 1, 2), (1, 3, 2), (1, 4, 2)]
    with pytest.raises(ValueError):
        from_triangles(verts, tris)
