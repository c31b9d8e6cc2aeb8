"""61-point Gauss-Kronrod pair on [-1, 1].

Generated by scripts/gen_gauss_kronrod.py (exact-rational Stieltjes construction,
60-digit arithmetic, 30 digits emitted); do not edit by hand. The embedded
30-point Gauss rule lives on the odd-index nodes.
"""

import numpy as np

GK_NODES = np.array([
    -0.999484410050490637571325895706,
    -0.996893484074649540271630050919,
    -0.991630996870404594858628366109,
    -0.983668123279747209970032581606,
    -0.973116322501126268374693868424,
    -0.960021864968307512216871025582,
    -0.944374444748559979415831324037,
    -0.926200047429274325879324277080,
    -0.905573307699907798546522558926,
    -0.882560535792052681543116462530,
    -0.857205233546061098958658510659,
    -0.829565762382768397442898119733,
    -0.799727835821839083013668942323,
    -0.767777432104826194917977340975,
    -0.733790062453226804726171131370,
    -0.697850494793315796932292388027,
    -0.660061064126626961370053668149,
    -0.620526182989242861140477556431,
    -0.579345235826361691756024932173,
    -0.536624148142019899264169793311,
    -0.492480467861778574993693061208,
    -0.447033769538089176780609900323,
    -0.400401254830394392535476211543,
    -0.352704725530878113471037207089,
    -0.304073202273625077372677107199,
    -0.254636926167889846439805129818,
    -0.204525116682309891438957671002,
    -0.153869913608583546963794672743,
    -0.102806937966737030147096751318,
    -0.0514718425553176958330252131667,
    0.0,
    0.0514718425553176958330252131667,
    0.102806937966737030147096751318,
    0.153869913608583546963794672743,
    0.204525116682309891438957671002,
    0.254636926167889846439805129818,
    0.304073202273625077372677107199,
    0.352704725530878113471037207089,
    0.400401254830394392535476211543,
    0.447033769538089176780609900323,
    0.492480467861778574993693061208,
    0.536624148142019899264169793311,
    0.579345235826361691756024932173,
    0.620526182989242861140477556431,
    0.660061064126626961370053668149,
    0.697850494793315796932292388027,
    0.733790062453226804726171131370,
    0.767777432104826194917977340975,
    0.799727835821839083013668942323,
    0.829565762382768397442898119733,
    0.857205233546061098958658510659,
    0.882560535792052681543116462530,
    0.905573307699907798546522558926,
    0.926200047429274325879324277080,
    0.944374444748559979415831324037,
    0.960021864968307512216871025582,
    0.973116322501126268374693868424,
    0.983668123279747209970032581606,
    0.991630996870404594858628366109,
    0.996893484074649540271630050919,
    0.999484410050490637571325895706,
])

GK_WEIGHTS = np.array([
    0.00138901369867700762455159122676,
    0.00389046112709988405126720184452,
    0.00663070391593129217331982636975,
    0.00927327965951776342844114689202,
    0.0118230152534963417422328988533,
    0.0143697295070458048124514324436,
    0.0169208891890532726275722894203,
    0.0194141411939423811734089510501,
    0.0218280358216091922971674857383,
    0.0241911620780806013656863707252,
    0.0265099548823331016106017093351,
    0.0287540487650412928439787853543,
    0.0309072575623877624728842529431,
    0.0329814470574837260318141910169,
    0.0349793380280600241374996707315,
    0.0368823646518212292239110656171,
    0.0386789456247275929503486515323,
    0.0403745389515359591119952797525,
    0.0419698102151642461471475412860,
    0.0434525397013560693168317281171,
    0.0448148001331626631923555516167,
    0.0460592382710069881162717355594,
    0.0471855465692991539452614781811,
    0.0481858617570871291407794922983,
    0.0490554345550297788875281653672,
    0.0497956834270742063578115693799,
    0.0504059214027823468408930856536,
    0.0508817958987496064922974730498,
    0.0512215478492587721706562826049,
    0.0514261285374590259338628792158,
    0.0514947294294515675583404336471,
    0.0514261285374590259338628792158,
    0.0512215478492587721706562826049,
    0.0508817958987496064922974730498,
    0.0504059214027823468408930856536,
    0.0497956834270742063578115693799,
    0.0490554345550297788875281653672,
    0.0481858617570871291407794922983,
    0.0471855465692991539452614781811,
    0.0460592382710069881162717355594,
    0.0448148001331626631923555516167,
    0.0434525397013560693168317281171,
    0.0419698102151642461471475412860,
    0.0403745389515359591119952797525,
    0.0386789456247275929503486515323,
    0.0368823646518212292239110656171,
    0.0349793380280600241374996707315,
    0.0329814470574837260318141910169,
    0.0309072575623877624728842529431,
    0.0287540487650412928439787853543,
    0.0265099548823331016106017093351,
    0.0241911620780806013656863707252,
    0.0218280358216091922971674857383,
    0.0194141411939423811734089510501,
    0.0169208891890532726275722894203,
    0.0143697295070458048124514324436,
    0.0118230152534963417422328988533,
    0.00927327965951776342844114689202,
    0.00663070391593129217331982636975,
    0.00389046112709988405126720184452,
    0.00138901369867700762455159122676,
])

# Weights of the embedded 30-point Gauss rule, aligned with GK_NODES[1::2].
GAUSS_WEIGHTS = np.array([
    0.00796819249616660561546588347467,
    0.0184664683110909591423021319120,
    0.0287847078833233693497191796113,
    0.0387991925696270495968019364463,
    0.0484026728305940529029381404228,
    0.0574931562176190664817216894021,
    0.0659742298821804951281285151160,
    0.0737559747377052062682438500222,
    0.0807558952294202153546949384605,
    0.0868997872010829798023875307151,
    0.0921225222377861287176327070876,
    0.0963687371746442596394686263518,
    0.0995934205867952670627802821036,
    0.101762389748405504596428952169,
    0.102852652893558840341285636705,
    0.102852652893558840341285636705,
    0.101762389748405504596428952169,
    0.0995934205867952670627802821036,
    0.0963687371746442596394686263518,
    0.0921225222377861287176327070876,
    0.0868997872010829798023875307151,
    0.0807558952294202153546949384605,
    0.0737559747377052062682438500222,
    0.0659742298821804951281285151160,
    0.0574931562176190664817216894021,
    0.0484026728305940529029381404228,
    0.0387991925696270495968019364463,
    0.0287847078833233693497191796113,
    0.0184664683110909591423021319120,
    0.00796819249616660561546588347467,
])

GAUSS_SLICE = slice(1, 61, 2)
