"""Regenerate the bundled fixture notebooks and the corpus-stats snapshot.

The two example notebooks (house price / covid case prediction) mirror the
cells our golden tests run against. The stats snapshot is computed here by
direct brute-force counting over the raw JSON, independently of the
library code it later validates.
"""

import json
import os

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")

TABLE_OUTPUT = [{
    "output_type": "execute_result",
    "execution_count": 1,
    "data": {
        "text/html": "<div><table border=\"1\"><tr><th>0</th></tr><tr><td>1</td></tr></table></div>",
        "text/plain": "   0\n0  1",
    },
    "metadata": {},
}]

TEXT_OUTPUT = [{
    "output_type": "execute_result",
    "execution_count": 1,
    "data": {"text/plain": "0.1097"},
    "metadata": {},
}]


def code_cell(idx, source, outputs=None):
    return {
        "cell_type": "code",
        "id": f"cell-{idx}",
        "execution_count": 1 if outputs else None,
        "metadata": {},
        "outputs": outputs or [],
        "source": source.splitlines(keepends=True),
    }


HOUSE_CELLS = [
    ("import pandas as pd\n"
     "import numpy as np\n"
     "from sklearn.linear_model import LassoCV\n"
     "from sklearn.model_selection import cross_val_score", None),
    ("train = pd.read_csv('train.csv')\n"
     "test = pd.read_csv('test.csv')", None),
    ("train.head()", TABLE_OUTPUT),
    ("all_data = pd.concat((train.loc[:,'SubClass':'SaleCond'],\n"
     "                      test.loc[:,'SubClass':'SaleCond']))", None),
    ("all_data = pd.get_dummies(all_data)", None),
    ("all_data = all_data.fillna(all_data.mean())", None),
    ("X_train = all_data[:train.shape[0]]\n"
     "X_test = all_data[train.shape[0]:]\n"
     "y = train.SalePrice", None),
    ("model_lasso = LassoCV(alphas = [1, 0.1, 0.001, 0.0005]).fit(X_train, y)", None),
    ("def rmse_cv(model):\n"
     "    rmse= np.sqrt(-cross_val_score(model, X_train, y, scoring=\"neg_mean_squared_error\", cv = 5))\n"
     "    return(rmse)\n"
     "rmse_cv(model_lasso).mean()", TEXT_OUTPUT),
]

COVID_CELLS = [
    ("import numpy as np\n"
     "import pandas as pd\n"
     "from sklearn.ensemble import RandomForestClassifier", None),
    ("train = pd.read_csv(\"train.csv\")\n"
     "test = pd.read_csv(\"test.csv\")\n"
     "train.head()", TABLE_OUTPUT),
    ("train.describe()", TABLE_OUTPUT),
    ("train[\"Date\"] = train[\"Date\"].apply(lambda x: x.replace(\"-\",\"\"))\n"
     "train[\"Date\"] = train[\"Date\"].astype(int)\n"
     "train.head()", TABLE_OUTPUT),
    ("train.isnull().sum()", TEXT_OUTPUT),
    ("test[\"Date\"] = test[\"Date\"].apply(lambda x: x.replace(\"-\",\"\"))\n"
     "test[\"Date\"]  = test[\"Date\"].astype(int)", None),
    ("x = train[['Lat', 'Long', 'Date']]\n"
     "y = train[['ConfirmedCases']]\n"
     "x_test = test[['Lat', 'Long', 'Date']]", None),
    ("Tree_model = RandomForestClassifier(max_depth=200, random_state=0)\n"
     "Tree_model.fit(x,y)", None),
    ("pred = Tree_model.predict(x_test)\n"
     "pred = pd.DataFrame(pred)\n"
     "pred.columns = [\"ConfirmedCases_prediction\"]", None),
]


def notebook(cells):
    return {
        "cells": cells,
        "metadata": {"language_info": {"name": "python"}},
        "nbformat": 4,
        "nbformat_minor": 5,
    }


def markdown_cell(idx, source):
    return {
        "cell_type": "markdown",
        "id": f"md-{idx}",
        "metadata": {},
        "source": source.splitlines(keepends=True),
    }


# Mini corpus: three small notebooks exercising the stats and pair paths.
MINI = {
    "alpha.ipynb": [
        markdown_cell(0, "# Data loading\n\nRead the data before modeling."),
        code_cell(1, "train = pd.read_csv('train.csv')"),
        markdown_cell(2, "Inspect the head of the table."),
        code_cell(3, "train.head()", TABLE_OUTPUT),
        code_cell(4, "# fit model\nmodel.fit(X, y)"),
    ],
    "beta.ipynb": [
        markdown_cell(0, "Clean missing values. Then continue."),
        code_cell(1, "df = df.fillna(0)"),
        code_cell(2, "df.describe()", TABLE_OUTPUT),
    ],
    "gamma.ipynb": [
        markdown_cell(0, "## Feature engineering overview"),
        code_cell(1, "X = pd.get_dummies(X)"),
        markdown_cell(2, "Train the final model now."),
        code_cell(3, "clf.fit(X, y)"),
        markdown_cell(4, "**Done** with everything here."),
    ],
}


def median_low(values):
    values = sorted(values)
    return values[(len(values) - 1) // 2]


def brute_force_stats(paths):
    records = []
    for path in paths:
        with open(path) as handle:
            raw = json.load(handle)
        code = sum(1 for c in raw["cells"] if c["cell_type"] == "code")
        md_cells = [c for c in raw["cells"] if c["cell_type"] == "markdown"]
        words = 0
        for cell in md_cells:
            text = "".join(cell["source"])
            for marker in ("#", "*", "`", "_"):
                text = text.replace(marker, " ")
            words += len(text.split())
        records.append({
            "notebook": os.path.basename(path),
            "total_cells": len(raw["cells"]),
            "code_cells": code,
            "markdown_cells": len(md_cells),
            "markdown_words": words,
        })
    return {
        "notebooks": records,
        "medians": {
            "total_cells": median_low(r["total_cells"] for r in records),
            "code_cells": median_low(r["code_cells"] for r in records),
            "markdown_cells": median_low(r["markdown_cells"] for r in records),
            "markdown_words": median_low(r["markdown_words"] for r in records),
        },
    }


def main():
    os.makedirs(os.path.join(FIXTURES, "mini_corpus"), exist_ok=True)
    for name, cells in (("house.ipynb", HOUSE_CELLS), ("covid.ipynb", COVID_CELLS)):
        nb = notebook([code_cell(i, src, out) for i, (src, out) in enumerate(cells)])
        with open(os.path.join(FIXTURES, name), "w") as handle:
            json.dump(nb, handle, indent=1)
    mini_paths = []
    for name, cells in sorted(MINI.items()):
        path = os.path.join(FIXTURES, "mini_corpus", name)
        with open(path, "w") as handle:
            json.dump(notebook(cells), handle, indent=1)
        mini_paths.append(path)
    stats = brute_force_stats(mini_paths)
    with open(os.path.join(FIXTURES, "stats_snapshot.json"), "w") as handle:
        json.dump(stats, handle, indent=2)
    print("fixtures written")


if __name__ == "__main__":
    main()
