"""Regenerates the molecule fixtures under crates/core/tests/data.

Requires RDKit. Coordinates come from ETKDG (fixed seed) followed by MMFF
relaxation; hydrogens are removed before writing, bonds are written in
Kekule form. The companion JSON freezes reference values used by tests.
"""
import json
import sys
from pathlib import Path

from rdkit import Chem
from rdkit.Chem import AllChem, Crippen, Descriptors, Lipinski

CORPUS = [
    ("aspirin", "CC(=O)Oc1ccccc1C(=O)O"),
    ("caffeine", "Cn1cnc2c1c(=O)n(C)c(=O)n2C"),
    ("ibuprofen", "CC(C)Cc1ccc(cc1)C(C)C(=O)O"),
    ("paracetamol", "CC(=O)Nc1ccc(O)cc1"),
    ("nicotine", "CN1CCCC1c1cccnc1"),
    ("diazepam", "CN1C(=O)CN=C(c2ccccc2)c2cc(Cl)ccc21"),
    ("sildenafil", "CCCc1nn(C)c2c1nc([nH]c2=O)-c1cc(ccc1OCC)S(=O)(=O)N1CCN(C)CC1"),
    ("celecoxib", "Cc1ccc(cc1)-c1cc(nn1-c1ccc(cc1)S(N)(=O)=O)C(F)(F)F"),
    ("ciprofloxacin", "OC(=O)c1cn(C2CC2)c2cc(N3CCNCC3)c(F)cc2c1=O"),
    ("metformin", "CN(C)C(=N)NC(=N)N"),
    ("atenolol", "CC(C)NCC(O)COc1ccc(CC(N)=O)cc1"),
    ("propranolol", "CC(C)NCC(O)COc1cccc2ccccc12"),
    ("naproxen", "COc1ccc2cc(ccc2c1)C(C)C(=O)O"),
    ("diclofenac", "OC(=O)Cc1ccccc1Nc1c(Cl)cccc1Cl"),
    ("fluconazole", "OC(Cn1cncn1)(Cn1cncn1)c1ccc(F)cc1F"),
    ("omeprazole", "COc1ccc2[nH]c(nc2c1)S(=O)Cc1ncc(C)c(OC)c1C"),
    ("lidocaine", "CCN(CC)CC(=O)Nc1c(C)cccc1C"),
    ("warfarin", "CC(=O)CC(c1ccccc1)c1c(O)c2ccccc2oc1=O"),
    ("theophylline", "Cn1c2nc[nH]c2c(=O)n(C)c1=O"),
    ("adenine", "Nc1ncnc2[nH]cnc12"),
    ("uracil", "O=c1cc[nH]c(=O)[nH]1"),
    ("indole", "c1ccc2[nH]ccc2c1"),
    ("quinoline", "c1ccc2ncccc2c1"),
    ("sulfamethoxazole", "Cc1cc(NS(=O)(=O)c2ccc(N)cc2)no1"),
    ("sulfathiazole", "Nc1ccc(cc1)S(=O)(=O)Nc1nccs1"),
    ("testosterone", "CC12CCC3C(CCC4=CC(=O)CCC34C)C1CCC2O"),
    ("morphine", "CN1CCC23C4Oc5c(O)ccc(CC1C2C=CC4O)c35"),
    ("nitrobenzene", "O=[N+]([O-])c1ccccc1"),
    ("tryptophan", "NC(Cc1c[nH]c2ccccc12)C(=O)O"),
    ("histamine", "NCCc1c[nH]cn1"),
    ("phenylalanine", "NC(Cc1ccccc1)C(=O)O"),
    ("glutamine", "NC(=O)CCC(N)C(=O)O"),
    ("hydroxyurea", "NC(=O)NO"),
    ("methyl_phosphate", "COP(=O)(O)O"),
    ("vanillin", "COc1cc(C=O)ccc1O"),
    ("benzamide", "NC(=O)c1ccccc1"),
    ("fomepizole", "Cc1cn[nH]c1"),
    ("methylthiophene", "Cc1cccs1"),
    ("aminopyrimidine", "Nc1ncccn1"),
    ("methyl_phenylcarbamate", "COC(=O)Nc1ccccc1"),
    ("biphenyl", "c1ccc(cc1)-c1ccccc1"),
    ("bibenzyl", "c1ccc(CCc2ccccc2)cc1"),
    ("phenylacetylene", "C#Cc1ccccc1"),
    ("benzonitrile", "N#Cc1ccccc1"),
    ("cyclohexanecarboxylic_acid", "OC(=O)C1CCCCC1"),
    ("cyclopropylbenzene", "c1ccc(cc1)C1CC1"),
    ("guanine", "Nc1nc2[nH]cnc2c(=O)[nH]1"),
    ("dopamine", "NCCc1ccc(O)c(O)c1"),
    ("chlorpromazine", "CN(C)CCCN1c2ccccc2Sc2ccc(Cl)cc21"),
    ("benzimidazole", "c1ccc2[nH]cnc2c1"),
]

SMALL = [
    ("methane", "C"),
    ("ethane", "CC"),
    ("propane", "CCC"),
    ("butane", "CCCC"),
    ("hexane", "CCCCCC"),
    ("ethene", "C=C"),
    ("cyclohexane", "C1CCCCC1"),
    ("benzene", "c1ccccc1"),
    ("toluene", "Cc1ccccc1"),
    ("naphthalene", "c1ccc2ccccc2c1"),
    ("acetamide", "CC(N)=O"),
]


def embed(name, smiles):
    mol = Chem.AddHs(Chem.MolFromSmiles(smiles))
    params = AllChem.ETKDGv3()
    params.randomSeed = 20240611
    if AllChem.EmbedMolecule(mol, params) != 0:
        raise RuntimeError(f"embedding failed for {name}")
    AllChem.MMFFOptimizeMolecule(mol, maxIters=2000)
    heavy = Chem.RemoveHs(mol)
    heavy.SetProp("_Name", name)
    return heavy


def reference_values(mol, smiles):
    ring_sizes = sorted(len(r) for r in Chem.GetSymmSSSR(mol))
    return {
        "name": mol.GetProp("_Name"),
        "smiles": smiles,
        "heavy_atoms": mol.GetNumAtoms(),
        "bonds": mol.GetNumBonds(),
        "ring_sizes": ring_sizes,
        "aromatic_atoms": [a.GetIdx() for a in mol.GetAtoms() if a.GetIsAromatic()],
        "logp": round(Crippen.MolLogP(mol), 6),
        "mol_weight": round(Descriptors.MolWt(mol), 4),
        "hba": Lipinski.NOCount(mol),
        "hbd": Lipinski.NHOHCount(mol),
        "total_h": [a.GetTotalNumHs() for a in mol.GetAtoms()],
    }


def write(entries, sdf_path, json_path):
    writer = Chem.SDWriter(str(sdf_path))
    writer.SetKekulize(True)
    refs = []
    for name, smiles in entries:
        mol = embed(name, smiles)
        writer.write(mol)
        refs.append(reference_values(mol, smiles))
    writer.close()
    json_path.write_text(json.dumps(refs, indent=1) + "\n")


if __name__ == "__main__":
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/data")
    write(CORPUS, out / "corpus50.sdf", out / "corpus50.json")
    write(SMALL, out / "small.sdf", out / "small.json")
