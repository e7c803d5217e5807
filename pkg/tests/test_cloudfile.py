import numpy as np
import pytest

from pointpd.cloudfile import (
    CloudFormatError,
    cloud_to_text,
    parse_cloud,
    read_cloud,
    write_cloud,
)
from pointpd.geometry import PointCloud


class TestParseCloud:
    def test_basic(self):
        cloud = parse_cloud("0 0\n1 0\n0.5 2\n")
        assert cloud.points.shape == (3, 2)
        assert np.array_equal(cloud.points, [[0, 0], [1, 0], [0.5, 2]])

    def test_comments_and_blank_lines(self):
        text = "# a unit segment\n\n0 0\n   \n# midpoint comment\n1 0\n"
        cloud = parse_cloud(text)
        assert cloud.points.shape == (2, 2)

    def test_scientific_notation_and_signs(self):
        cloud = parse_cloud("1e-3 -2.5E+1\n+4 .5\n")
        assert np.array_equal(cloud.points, [[0.001, -25.0], [4.0, 0.5]])

    def test_tabs_and_extra_spaces(self):
        cloud = parse_cloud("0\t0\n 1   0 \n")
        assert cloud.points.shape == (2, 2)

    def test_one_dimensional(self):
        assert parse_cloud("0\n1\n3\n").points.shape == (3, 1)

    def test_non_numeric_reports_line(self):
        with pytest.raises(CloudFormatError, match="<cloud>:2"):
            parse_cloud("0 0\n1 oops\n")

    def test_arity_mismatch_reports_line(self):
        with pytest.raises(CloudFormatError, match="expected 2 coordinates, got 3"):
            parse_cloud("0 0\n1 2 3\n")

    def test_non_finite_rejected(self):
        with pytest.raises(CloudFormatError, match="finite"):
            parse_cloud("0 0\ninf 0\n")
        with pytest.raises(CloudFormatError, match="finite"):
            parse_cloud("0 0\nnan 0\n")

    def test_empty_input(self):
        with pytest.raises(CloudFormatError, match="no points"):
            parse_cloud("# only a comment\n\n")

    def test_custom_name_in_errors(self):
        with pytest.raises(CloudFormatError, match="data.txt:1"):
            parse_cloud("x y\n", name="data.txt")

    def test_duplicate_points_parse_but_fail_to_filter(self):
        # duplicates are a geometry problem, not a file-format problem:
        # the parse succeeds and the complex build rejects them
        from pointpd.filtration import build_vr

        cloud = parse_cloud("0 0\n0 0\n")
        with pytest.raises(ValueError, match="coincident"):
            build_vr(cloud)


class TestRoundTrip:
    def test_text_round_trip_is_exact(self):
        rng = np.random.default_rng(5)
        cloud = PointCloud(rng.random((7, 3)))
        again = parse_cloud(cloud_to_text(cloud))
        assert np.array_equal(again.points, cloud.points)

    def test_text_format(self):
        cloud = PointCloud([[0.5, 2.0], [1.0, 0.1]])
        assert cloud_to_text(cloud) == "0.5 2.0\n1.0 0.1\n"

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "cloud.txt"
        cloud = PointCloud([[0.0, 0.0], [1.0, 0.0], [0.0, 1.5]])
        write_cloud(cloud, path)
        again = read_cloud(path)
        assert np.array_equal(again.points, cloud.points)

    def test_read_missing_file(self, tmp_path):
        with pytest.raises(CloudFormatError, match="cannot read file"):
            read_cloud(tmp_path / "absent.txt")

    def test_read_reports_filename(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("0 0\nbroken line\n")
        with pytest.raises(CloudFormatError, match="bad.txt:2"):
            read_cloud(path)
