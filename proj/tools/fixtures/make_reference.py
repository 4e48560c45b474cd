#!/usr/bin/env python3
"""Regenerate the reference fixtures under tests/data from the NCI sample set
bundled with RDKit. RDKit is only needed to rebuild the fixtures, never to
build or test the C++ code."""

import csv
import os
import random
import sys

from rdkit import Chem, RDLogger
from rdkit.Chem import Descriptors, rdMolDescriptors
from rdkit.Chem.Scaffolds import MurckoScaffold

RDLogger.DisableLog("rdApp.*")

SOURCE = os.path.join(os.path.dirname(Chem.__file__), "..", "Data", "NCI", "first_5K.smi")
OUT = os.path.join(os.path.dirname(__file__), "..", "..", "tests", "data")
COUNT = 500


def usable(mol, smi):
    if mol is None or "." in smi or "*" in smi:
        return False
    if any(a.GetAtomicNum() == 1 for a in mol.GetAtoms()):
        return False
    if any(a.GetNumRadicalElectrons() for a in mol.GetAtoms()):
        return False
    # Stereo markers would be discarded anyway; keep the corpus plain.
    return not any(c in smi for c in "@/\\")


def element_counts(mol):
    counts = {}
    for a in mol.GetAtoms():
        counts[a.GetSymbol()] = counts.get(a.GetSymbol(), 0) + 1
    return ",".join(f"{k}:{counts[k]}" for k in sorted(counts))


def main():
    rows = []
    with open(SOURCE) as fh:
        for line in fh:
            raw = line.split()[0]
            mol = Chem.MolFromSmiles(raw)
            if mol is None:
                continue
            smi = Chem.MolToSmiles(mol, isomericSmiles=False)
            mol = Chem.MolFromSmiles(smi)
            if not usable(mol, smi):
                continue
            if mol.GetNumAtoms() < 2:
                continue
            scaffold = MurckoScaffold.GetScaffoldForMol(mol)
            rings = sorted(len(r) for r in Chem.GetSSSR(mol))
            rows.append({
                "smiles": smi,
                "heavy_atoms": mol.GetNumAtoms(),
                "bonds": mol.GetNumBonds(),
                "elements": element_counts(mol),
                "total_h": sum(a.GetTotalNumHs() for a in mol.GetAtoms()),
                "aromatic_atoms": sum(a.GetIsAromatic() for a in mol.GetAtoms()),
                "ring_sizes": " ".join(map(str, rings)),
                "scaffold_atoms": scaffold.GetNumAtoms(),
                "scaffold_bonds": scaffold.GetNumBonds(),
                "scaffold_smiles": Chem.MolToSmiles(scaffold) if scaffold.GetNumAtoms() else "",
                "mol_wt": f"{Descriptors.MolWt(mol):.4f}",
                "tpsa": f"{rdMolDescriptors.CalcTPSA(mol):.2f}",
            })
            if len(rows) == COUNT:
                break

    fields = list(rows[0].keys())
    with open(os.path.join(OUT, "nci500_reference.tsv"), "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, delimiter="\t", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)

    # Assay-style CSV over the same molecules with three labelled targets.
    rng = random.Random(20180101)
    with open(os.path.join(OUT, "fixture500.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["mol_id", "smiles", "HALOGEN", "MULTI_RING", "LARGE"])
        for i, r in enumerate(rows):
            mol = Chem.MolFromSmiles(r["smiles"])
            halogen = any(a.GetSymbol() in ("F", "Cl", "Br", "I") for a in mol.GetAtoms())
            multi = len(r["ring_sizes"].split()) >= 2
            large = r["heavy_atoms"] >= 16
            labels = []
            for v in (halogen, multi, large):
                labels.append("" if rng.random() < 0.1 else str(int(v)))
            w.writerow([f"NCI-{i:04d}", r["smiles"]] + labels)
    print(f"wrote {len(rows)} molecules", file=sys.stderr)


if __name__ == "__main__":
    main()
