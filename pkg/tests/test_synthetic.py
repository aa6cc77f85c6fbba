import numpy as np
import pytest

from cns_saliency import colorname, synthetic


@pytest.mark.parametrize("seed", range(15))
def test_centered_object_contract(seed):
    scene = synthetic.centered_object(np.random.default_rng(seed))
    m = scene.mask
    assert m.shape == (300, 400)
    assert 0.10 <= m.mean() <= 0.40
    assert not (m[:4].any() or m[-4:].any() or m[:, :4].any() or m[:, -4:].any())
    assert scene.object_color != scene.background_color
    colors = np.unique(scene.image.reshape(-1, 3), axis=0)
    assert len(colors) == 2
    idx = colorname.to_index_image(scene.image, colorname.fallback_table())
    assert (idx[m] == scene.object_color).all() and (idx[~m] == scene.background_color).all()


@pytest.mark.parametrize("seed", range(8))
def test_border_object_touches_border(seed):
    m = synthetic.border_object(np.random.default_rng(seed)).mask
    assert m.any()
    assert m[0].any() or m[-1].any() or m[:, 0].any() or m[:, -1].any()


def test_small_objects_count():
    scene = synthetic.small_objects(np.random.default_rng(0), radius=6, count=3)
    assert 3 * 100 < scene.mask.sum() < 3 * 130
