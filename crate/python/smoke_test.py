"""Smoke test for the pysplitforest extension module."""

import json

import pysplitforest as sf


def main():
    x, y, truth = sf.simulate("pure_3", 300, seed=1)
    assert len(x) == 300 and len(x[0]) == 6 and len(truth) == 300

    forest = sf.Forest.fit(x, y, "intf", seed=2, params={"num.trees": "50", "npairs": "20"})
    assert forest.num_trees == 50
    preds = forest.predict(x[:10])
    assert len(preds) == 10 and all(isinstance(p, float) for p in preds)

    again = sf.Forest.from_json(forest.to_json())
    assert again.predict(x[:10]) == preds
    assert json.loads(forest.to_json())["n_features"] == 6

    try:
        forest.predict([[0.0, 1.0]])
    except ValueError:
        pass
    else:
        raise AssertionError("wrong dimension accepted")

    try:
        sf.Forest.fit(x, y, "rf", seed=0, params={"mtry": "9"})
    except ValueError as e:
        assert "mtry" in str(e)
    else:
        raise AssertionError("invalid mtry accepted")

    feature, threshold, gain = sf.best_cart_split([[1.0], [2.0], [3.0], [4.0]], [0.0, 0.0, 2.0, 2.0])
    assert (feature, threshold, gain) == (0, 2.0, 1.0)

    csv = sf.monte_carlo("pure_3", ["mean_y", "one_nn"], reps=2, seed=3)
    lines = csv.strip().splitlines()
    assert lines[0].startswith("model,d,n_train") and len(lines) == 3
    print("smoke test ok")


if __name__ == "__main__":
    main()
