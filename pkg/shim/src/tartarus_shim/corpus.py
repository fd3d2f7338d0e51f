"""Reference molecules for the fragment-commonness model behind sascore.

A compact set of well-known drugs, natural products, solvents and common
building blocks.  Substructure environments that occur often here count as
"easy" chemistry; environments never seen count as hard.
"""

REFERENCE_SMILES = [
    # analgesics / anti-inflammatories
    "CC(=O)Oc1ccccc1C(=O)O",            # aspirin
    "CC(=O)Nc1ccc(O)cc1",               # paracetamol
    "CC(C)Cc1ccc(C(C)C(=O)O)cc1",       # ibuprofen
    "COc1ccc2cc(C(C)C(=O)O)ccc2c1",     # naproxen
    "OC(=O)c1ccccc1O",                  # salicylic acid
    "OC(=O)c1ccccc1",                   # benzoic acid
    # CNS / alkaloids
    "Cn1cnc2c1c(=O)n(C)c(=O)n2C",       # caffeine
    "CN1CCCC1c1cccnc1",                 # nicotine
    "NCCc1ccc(O)c(O)c1",                # dopamine
    "NCCc1c[nH]c2ccccc12",              # tryptamine
    "CC(N)Cc1ccccc1",                   # amphetamine
    "OCCN1CCN(CCCN2c3ccccc3Sc3ccc(Cl)cc32)CC1",  # perphenazine-like
    # antibiotics / heterocycles
    "CCOC(=O)c1ccc(N)cc1",              # benzocaine
    "CCN(CC)CCOC(=O)c1ccc(N)cc1",       # procaine
    "NS(=O)(=O)c1ccc(N)cc1",            # sulfanilamide
    "Nc1ncnc2[nH]cnc12",                # adenine
    "O=c1cc[nH]c(=O)[nH]1",             # uracil
    "Cc1c[nH]c(=O)[nH]c1=O",            # thymine
    "Nc1cc[nH]c(=O)n1",                 # cytosine
    "c1ccc2[nH]ccc2c1",                 # indole
    "c1ccc2ncccc2c1",                   # quinoline
    "c1ccc2c(c1)cccn2",                 # isoquinoline-like
    "c1cnc2[nH]ccc2c1",                 # azaindole
    "c1ccoc1",                          # furan
    "c1ccsc1",                          # thiophene
    "c1cc[nH]c1",                       # pyrrole
    "c1ccncc1",                         # pyridine
    "c1cncnc1",                         # pyrimidine
    "c1cnccn1",                         # pyrazine
    "c1cc2ccccc2cc1",                   # naphthalene (written oddly on purpose)
    "c1ccc2ccccc2c1",                   # naphthalene
    "c1ccc2c(c1)ccc1ccccc12",           # phenanthrene
    "c1ccc2sc3ccccc3c2c1",              # dibenzothiophene
    "c1ccc2oc3ccccc3c2c1",              # dibenzofuran
    "c1ccc2[nH]c3ccccc3c2c1",           # carbazole
    "c1csc2c1ccc1ccsc12",               # thienothiophene-like
    "c1ccc(-c2ccccc2)cc1",              # biphenyl
    "c1ccc(-c2cccs2)cc1",               # phenylthiophene
    "c1ccc(-c2ccco2)cc1",               # phenylfuran
    "c1ccc(-c2ccncc2)cc1",              # phenylpyridine
    # steroids / terpenoid cores
    "CC12CCC3c4ccc(O)cc4CCC3C1CCC2O",   # estradiol-like
    "CC(C)CCCC(C)C1CCC2C3CCC4=CC(=O)CCC4(C)C3CCC12C",  # cholestenone-like
    "CC1(C)C2CCC1(C)C(=O)C2",           # camphor
    "CC(C)C1CCC(C)CC1O",                # menthol
    "CC1=CCC(CC1)C(C)C",                # terpinene-like
    # sugars / polyols
    "OCC(O)C(O)C(O)C(O)CO",             # sorbitol
    "OCC1OC(O)C(O)C(O)C1O",             # glucose (cyclic)
    "OCC(O)CO",                         # glycerol
    "OCCO",                             # ethylene glycol
    # amino acids and small biologics
    "NC(C)C(=O)O",                      # alanine
    "NC(CC(=O)O)C(=O)O",                # aspartate
    "NC(CCC(=O)O)C(=O)O",               # glutamate
    "NC(Cc1ccccc1)C(=O)O",              # phenylalanine
    "NC(Cc1ccc(O)cc1)C(=O)O",           # tyrosine
    "NC(Cc1c[nH]c2ccccc12)C(=O)O",      # tryptophan
    "NC(CO)C(=O)O",                     # serine
    "NC(CS)C(=O)O",                     # cysteine
    "CSCCC(N)C(=O)O",                   # methionine
    "NC(CCCNC(=N)N)C(=O)O",             # arginine
    "OC(=O)CC(O)(CC(=O)O)C(=O)O",       # citric acid
    "OC(=O)C=CC(=O)O",                  # fumaric acid
    "CC(O)C(=O)O",                      # lactic acid
    "CC(=O)O",                          # acetic acid
    "OC(=O)CCC(=O)O",                   # succinic acid
    # solvents and reagents
    "CCO", "CCOCC", "CC(C)O", "CCCCO", "CO",
    "CC(C)=O", "CCOC(C)=O", "CC#N", "CN(C)C=O", "CS(C)=O",
    "C1CCOC1", "C1COCCO1", "CN1CCCC1=O", "ClCCl", "ClC(Cl)Cl",
    "c1ccccc1", "Cc1ccccc1", "Cc1ccccc1C", "Cc1ccc(C)cc1",
    "CCCCCC", "CCCCCCC", "C1CCCCC1", "CC1CCCCC1",
    # common functional building blocks
    "Nc1ccccc1",                        # aniline
    "Oc1ccccc1",                        # phenol
    "COc1ccccc1",                       # anisole
    "Clc1ccccc1",                       # chlorobenzene
    "Brc1ccccc1",                       # bromobenzene
    "Fc1ccccc1",                        # fluorobenzene
    "FC(F)(F)c1ccccc1",                 # benzotrifluoride
    "N#Cc1ccccc1",                      # benzonitrile
    "O=Cc1ccccc1",                      # benzaldehyde
    "CC(=O)c1ccccc1",                   # acetophenone
    "O=C(O)c1ccc(O)cc1",                # 4-hydroxybenzoic acid
    "COC(=O)c1ccccc1",                  # methyl benzoate
    "NC(=O)c1ccccc1",                   # benzamide
    "CNC(=O)c1ccccc1",                  # N-methylbenzamide
    "O=C(Nc1ccccc1)c1ccccc1",           # benzanilide
    "O=S(=O)(O)c1ccccc1",               # benzenesulfonic acid
    "NS(=O)(=O)c1ccccc1",               # benzenesulfonamide
    "O=[N+]([O-])c1ccccc1",             # nitrobenzene
    "CCN(CC)CC",                        # triethylamine
    "C1CCNCC1",                         # piperidine
    "C1CNCCN1",                         # piperazine
    "C1COCCN1",                         # morpholine
    "C1CCNC1",                          # pyrrolidine
    "OCCN1CCOCC1",                      # hydroxyethylmorpholine
    "CC(C)(C)OC(=O)NC1CCNCC1",          # Boc-aminopiperidine
    "O=C1CCCCC1",                       # cyclohexanone
    "OC1CCCCC1",                        # cyclohexanol
    "C1CC2CCC1C2",                      # norbornane
    "C1CC2CCC1CC2",                     # bicyclooctane
    # bridged and fused polycyclics (benchmark reaction substrates live here)
    "C1CC2CC1C=C2",                     # norbornene
    "CC1(C)C2CCC1C2",                   # camphane fragment
    "C1CC2CC3CC1CC(C2)C3",              # adamantane-like cage
    "C1CCC2CCCCC2C1",                   # decalin
    "C1CCC2CCCC2C1",                    # hydrindane
    "C1CC2C3CC1CC23",                   # tricyclic cage
    "C1C2C34C5C=CC(C5)C3(C4)C(C2)C1",   # double-H-transfer parent substrate
    "CC1C2C34C5C=CC(C5)C3(C4)C(C2)C1",  # methyl-substituted parent
    "C1C2C3C4C1C1C2C3C41",              # cubane-like cage
    "C1CC2(CC1)CCCC2",                  # spirodecane
    "CC(C)(C)c1ccc(O)cc1",              # BHT fragment
    "CC(C)Oc1ccccc1",                   # isopropoxybenzene
    "CCCCOC(=O)c1ccccc1",               # butyl benzoate
    "CCOC(=O)CC(=O)OCC",                # diethyl malonate
    "CC(=O)CC(C)=O",                    # acetylacetone
    "CCOC(=O)C(C)=O",                   # ethyl pyruvate-like
    "OCC1CCCO1",                        # tetrahydrofurfuryl alcohol
    "NCC1CCCO1",                        # THF methylamine
    "NCCO", "NCCN", "OCCOCCO",
    "CNC", "CNCC", "CN(C)CCO",
    "CC(C)CC(C)(C)C",                   # isooctane
    "CCCCCCCCO",                        # octanol
    "CCCCCCCC(=O)O",                    # octanoic acid
    "C=CC(=O)OC",                       # methyl acrylate
    "CC(=C)C(=O)OC",                    # methyl methacrylate
]
