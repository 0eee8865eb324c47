// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace tartarus::testing {

// Hand-picked molecules covering the element set, charges, fused and bridged
// ring systems, heteroaromatics and acyclic chains.
inline const std::vector<std::string>& seed_smiles() {
  static const std::vector<std::string> kSeeds = {
      "C",
      "CC",
      "CCO",
      "OCC",
      "C=C",
      "C#C",
      "C=C=C",
      "C=CC=C",
      "CC(=O)O",
      "CC(C)C",
      "CC(C)(C)C",
      "O=C=O",
      "C1CC1",
      "C1CCC1",
      "C1CCCC1",
      "C1CCCCC1",
      "C1CCCCCCC1",
      "c1ccccc1",
      "Cc1ccccc1",
      "Oc1ccccc1",
      "Nc1ccccc1",
      "Clc1ccccc1",
      "Brc1ccccc1",
      "Ic1ccccc1",
      "Fc1ccc(F)cc1",
      "c1ccc2ccccc2c1",
      "c1ccc2cc3ccccc3cc2c1",
      "c1ccncc1",
      "c1cc[nH]c1",
      "c1ccoc1",
      "c1ccsc1",
      "c1cnc[nH]1",
      "c1ncncn1",
      "c1ccc2[nH]ccc2c1",
      "c1ccc2ncccc2c1",
      "O=c1cc[nH]cc1",
      "Cn1cnc2c1c(=O)n(C)c(=O)n2C",
      "CC(=O)Oc1ccccc1C(=O)O",
      "CC(=O)Nc1ccc(O)cc1",
      "CC(C)Cc1ccc(C(C)C(=O)O)cc1",
      "OC(=O)c1ccccc1O",
      "C1CC2CCC1CC2",
      "C1CCC2(CC1)CCCC2",
      "C1CCC2(C1)CCCC2",
      "C1CCC2CCCCC2C1",
      "C12C3C4C1C5C2C3C45",
      "C1CC2CC1C=C2",
      "C1C2C34C5C=CC(C5)C3(C4)C(C2)C1",
      "C1=CC2C=CC1C2",
      "O=C1C=CC(=O)C=C1",
      "C1=CC=CC=CC=C1",
      "[NH4+]",
      "[O-]C(=O)C",
      "C[N+](C)(C)C",
      "C[n+]1ccccc1",
      "[O-][N+](=O)c1ccccc1",
      "CS(=O)(=O)C",
      "CS(C)=O",
      "OS(=O)(=O)O",
      "OP(=O)(O)O",
      "CP(C)C",
      "C[Si](C)(C)C",
      "C[Sn](C)(C)C",
      "B(O)(O)c1ccccc1",
      "c1ccc2c(c1)oc1ccccc12",
      "c1ccc2c(c1)sc1ccccc12",
      "c1ccc2c(c1)[nH]c1ccccc12",
      "N#Cc1ccccc1",
      "CC#N",
      "C=O",
      "CC=O",
      "NC(=O)N",
      "NC(=N)N",
      "CN=C=O",
      "CC(=O)OC",
      "COC",
      "CCN(CC)CC",
      "C1COCCN1",
      "C1CCNCC1",
      "C1CCOC1",
      "O1CC1",
      "N1CC1",
      "c1ccc(cc1)-c1ccccc1",
      "c1ccc(cc1)C=Cc1ccccc1",
      "CC(=O)C",
      "OCC(O)CO",
      "OC1C(O)C(O)C(O)C(O)C1O",
      "CC12CCC3C(CCC4=CC(=O)CCC34C)C1CCC2O",
      "Cc1cc(C)nc(C)n1",
      "c1ccc2nc3ccccc3cc2c1",
      "c1cc2ccc3cccc4ccc(c1)c2c34",
      "c1csc(c1)-c1cccs1",
      "c1coc(c1)C=O",
      "O=C1NC(=O)C=C1",
      "C1=CNC=C1",
      "FC(F)(F)c1ccccc1",
      "ClC(Cl)(Cl)Cl",
      "BrCCBr",
      "ICI",
      "[2H]C",
      "C[C@H](N)C(=O)O",
      "C/C=C/C",
      "F/C=C\\F",
      "CCCCCCCCCCCCCCCC",
      "c1ccc2c(c1)ccc1ccccc12",
      "n1ccc2ccccc2c1",
      "c1cnc2ncncc2n1",
      "Nc1ncnc2[nH]cnc12",
      "O=c1[nH]cnc2nc[nH]c12",
      "[C-]#[O+]",
      "C[S+](C)C",
      "[O-]c1ccccc1",
      "c1ccc[cH-]1",
      "[cH+]1cccccc1",
      "B1c2ccccc2-c2ccccc12",
      "c1ccc2c(c1)C1(c3ccccc3-2)CCCC1",
      "C1CC2(C1)CC2",
  };
  return kSeeds;
}

}  // namespace tartarus::testing
