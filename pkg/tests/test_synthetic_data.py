from synthetic import write_all


def test_bundled_data_is_reproducible(tmp_path, data_dir):
    write_all(tmp_path)
    for name in ("synthetic_gold.txt", "fixture_clean.txt", "fixture_noise10.txt"):
        assert (tmp_path / name).read_bytes() == (data_dir / name).read_bytes()
