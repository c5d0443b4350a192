// generated by tests/oracles/gen_mlf.py
pub const ML_CASES: &[(f64, f64, f64, f64, f64, f64, f64, f64)] = &[
    (1.5, 1.5, 0.5, 0.25, 1.3947437276180656, 0.1479763307316621, 0.5907224537755861, 0.049615113257233605),
    (1.5, 1.5, -3.0, 0.0, 0.2149766677682693, 0.0, 0.1603305891895311, 0.0),
    (1.5, 1.5, -5.07543, 0.0, 1.740901527624682e-09, 0.0, 0.05892687554442072, 0.0),
    (1.5, 1.5, -17.5, 0.0, 0.00010815793843680117, 0.0, -0.003846935116801815, 0.0),
    (1.5, 1.5, 12.0, -7.0, -15.31986818572795, -61.03580535224576, -1.638885729746831, -15.958012900551235),
    (1.5, 1.5, -40.0, 15.0, -0.0013560570906028413, -0.006255019238037952, -0.0010513376268892253, -0.0005710028204237167),
    (1.5, 1.5, -150.0, 1.0, -1.879975847625684e-05, -2.717389435272501e-07, -2.717033227946353e-07, -7.407376629829675e-09),
    (1.5, 1.5, -220.0, 0.0, -8.73386331736746e-06, 0.0, -7.945755093631519e-08, 0.0),
    (1.5, 1.5, 60.0, 80.0, 5603028.811576258, -2297156.9056201144, 661170.9270965626, -539573.3034372927),
    (1.5, 1.5, -600.0, 200.0, -8.462409961798487e-07, -6.346114685245655e-07, -1.903387406476673e-09, -2.750566192388285e-09),
    (1.5, 1.5, 0.0, 5.0, -0.70047485974132, 1.5339033647055595, -0.05019508790820592, 0.6087002873602778),
    (1.5, 0.5, 0.5, 0.25, 1.1218080366692598, 0.33272042047460104, 1.3247437626484586, 0.1841837000601988),
    (1.5, 0.5, -3.0, 0.0, -0.6139993174687554, 0.0, 0.013866295357404683, 0.0),
    (1.5, 0.5, -5.07543, 0.0, -0.4486188470461781, 0.0, -0.13361317815403742, 0.0),
    (1.5, 0.5, -17.5, 0.0, 0.10103612578526604, 0.0, 0.025996700478618563, 0.0),
    (1.5, 0.5, 12.0, -7.0, -204.7190126840949, -300.5538347237034, -41.90958226454426, -100.70964795802323),
    (1.5, 0.5, -40.0, 15.0, 0.07524979252758572, 0.007477563001396456, 0.009056767512455903, -0.010986968796492299),
    (1.5, 0.5, -150.0, 1.0, 5.1744479455609266e-05, 1.1232352857560988e-06, 1.126360763800616e-06, -1.814996634256127e-09),
    (1.5, 0.5, -220.0, 0.0, 2.1854060150300283e-05, 0.0, 2.0867237588675428e-07, 0.0),
    (1.5, 0.5, 60.0, 80.0, 127055694.25695388, 29630335.489421114, 19011764.701154917, -1776775.6793302756),
    (1.5, 0.5, -600.0, 200.0, 2.1150980254555667e-06, 1.5871876169441715e-06, 4.79995938788556e-09, 6.944101494353026e-09),
    (1.5, 0.5, 0.0, 5.0, -4.915489585072744, 0.3904885230412354, -1.5345416677962316, 1.4248755743468806),
    (1.3, 1.3, 0.5, 0.25, 1.500219186846817, 0.22766036800346506, 0.905842688208682, 0.11990496183062481),
    (1.3, 1.3, -3.0, 0.0, 0.1072056469970987, 0.0, 0.11651822708159708, 0.0),
    (1.3, 1.3, -5.07543, 0.0, -0.015867062762425922, 0.0, 0.021386703956027823, 0.0),
    (1.3, 1.3, -17.5, 0.0, -0.0006939691848174378, 0.0, -0.00019738845747682162, 0.0),
    (1.3, 1.3, 12.0, -7.0, -422.5101002920662, -118.09617215849379, -164.67817089804996, -65.42446614371873),
    (1.3, 1.3, -40.0, 15.0, -0.0001377983183771737, -0.00010241834211696951, -1.9639868357321244e-06, -1.540523379587121e-06),
    (1.3, 1.3, -150.0, 1.0, -1.3688390714031553e-05, -1.8478643140750943e-07, -1.8475277087883027e-07, -3.7410419122938655e-09),
    (1.3, 1.3, -220.0, 0.0, -6.314111765572292e-06, 0.0, -5.7888320553998125e-08, 0.0),
    (1.3, 1.3, 60.0, 80.0, -54372303464.72814, -23172137654.12281, -15311118326.814373, -3017630444.7782307),
    (1.3, 1.3, 0.0, 5.0, -1.7254132015300545, 0.5031083235311536, -0.7916226501990561, 0.494367303767905),
    (1.3, 0.3, 0.5, 0.25, 0.9998943907947353, 0.4406352092587673, 1.7410065665071865, 0.384428436069351),
    (1.3, 0.3, -3.0, 0.0, -0.42225939151909897, 0.0, -0.1226510417102081, 0.0),
    (1.3, 0.3, -5.07543, 0.0, -0.14587085334613273, 0.0, -0.1139857837405988, 0.0),
    (1.3, 0.3, -17.5, 0.0, 0.004282396652152463, 0.0, 0.0028690166926003745, 0.0),
    (1.3, 0.3, 12.0, -7.0, -3291.09513800504, 442.5208316826944, -1510.5076831048775, -33.04424864031262),
    (1.3, 0.3, -40.0, 15.0, 9.08280258468685e-05, 1.1083969806663438e-05, -0.00010183830835346084, -7.644373772492105e-06),
    (1.3, 0.3, -150.0, 1.0, 3.19251364616488e-05, 4.3388864133257406e-07, 4.338085738906254e-07, 8.84207125461061e-09),
    (1.3, 0.3, -220.0, 0.0, 1.4661826148772032e-05, 0.0, 1.3505130656410518e-07, 0.0),
    (1.3, 0.3, 60.0, 80.0, -896745354274.0037, -1834683121977.634, -347250302194.40155, -427946812290.08923),
    (1.3, 0.3, 0.0, 5.0, -3.731011434950399, -4.994614729234519, -3.3141857083740414, -1.369715270563267),
    (1.7, 1.7, 0.5, 0.25, 1.2750384444694338, 0.09316190461092616, 0.37237756756396106, 0.019460841067792816),
    (1.7, 1.7, -3.0, 0.0, 0.3674562023147524, 0.0, 0.16796457781190582, 0.0),
    (1.7, 1.7, -5.07543, 0.0, 0.09893465839578229, 0.0, 0.09559130231999025, 0.0),
    (1.7, 1.7, -17.5, 0.0, -0.061895382855969856, 0.0, -0.01432673076370602, 0.0),
    (1.7, 1.7, 12.0, -7.0, 6.0195651450832335, -16.434342189853894, 1.4764896734669868, -2.6043079081780114),
    (1.7, 1.7, -40.0, 15.0, -0.004204116250134572, 0.06777137734326952, 0.007342484519647987, 0.004980224103940455),
    (1.7, 1.7, -150.0, 1.0, -0.0002111666095140377, -6.145263746312335e-05, -6.15363545117662e-05, -1.9034271991711963e-06),
    (1.7, 1.7, -220.0, 0.0, -0.00018399519766228937, 0.0, 1.503099809617842e-07, 0.0),
    (1.7, 1.7, 60.0, 80.0, 14304.530519287977, 29860.925637281187, 2021.2118054582968, 1949.8124593474627),
    (1.7, 1.7, -600.0, 200.0, 0.0005271658292751363, -0.0006474342484384304, -1.5369965943523167e-05, -3.095115391784685e-05),
    (1.7, 1.7, 0.0, 5.0, 0.24954460678627607, 1.4309072299922392, 0.18983790982190904, 0.3229849798782976),
    (1.7, 1.7, -1500.0, 30.0, -1.7558457640828758e-07, -6.93460648528849e-09, -2.3001822330305063e-10, -1.4800707958900593e-11),
    (1.2, 2.2, 0.5, 0.25, 1.0896549089802081, 0.10468446571929294, 0.4168885613633539, 0.04714448036455701),
    (1.2, 2.2, -3.0, 0.0, 0.34521529049695937, 0.0, 0.09369370939443475, 0.0),
    (1.2, 2.2, -5.07543, 0.0, 0.21130700673271988, 0.0, 0.04297825870344027, 0.0),
    (1.2, 2.2, -17.5, 0.0, 0.057781938420926306, 0.0, 0.0033433168454655156, 0.0),
    (1.2, 2.2, 12.0, -7.0, -196.80923129269922, 29.160683697326032, -93.4217601277297, 11.661487561651823),
    (1.2, 2.2, -40.0, 15.0, 0.021991059314506213, 0.00828567786044892, 0.0004149652408325938, 0.00036454173715641877),
    (1.2, 2.2, -150.0, 1.0, 0.00667411801724985, 4.454654890792422e-05, 4.4542579859042714e-05, 5.946370626939718e-07),
    (1.2, 2.2, 60.0, 80.0, 2255337787240.9604, 135247006544.1739, 855403736255.4847, -65365746497.82442),
    (1.2, 2.2, 0.0, 5.0, -0.24067892837937446, 0.5796615400025797, -0.19696287210107286, 0.2248707578715437),
    (0.6, 1.0, 0.5, 0.25, 1.7302856535952176, 0.6480002159397983, 2.356743235380237, 1.2297247420293307),
    (0.6, 1.0, -3.0, 0.0, 0.1597034802650912, 0.0, 0.05282321093592838, 0.0),
    (0.6, 1.0, -5.07543, 0.0, 0.09366480875605052, 0.0, 0.018976403350043938, 0.0),
    (0.6, 1.0, 0.0, 5.0, -0.007549365133334413, 0.09153563629939826, -0.01883851786911145, -0.003303247286877825),
    (2.0, 2.0, 0.5, 0.25, 1.0849019574438457, 0.04378436153719407, 0.17511194814834474, 0.004317382537985452),
    (2.0, 2.0, -3.0, 0.0, 0.5698600991825139, 0.0, 0.12173610629286742, 0.0),
    (2.0, 2.0, -5.07543, 0.0, 0.34456745093283625, 0.0, 0.0960482874099663, 0.0),
    (2.0, 2.0, -17.5, 0.0, -0.20636036210214717, 0.0, 0.0085253320208736, 0.0),
    (2.0, 2.0, 12.0, -7.0, 3.719026353636104, -3.192728357230981, 0.41993487416526665, -0.25045472288541004),
    (2.0, 2.0, -40.0, 15.0, 0.07820800314752945, -0.20867989477196486, -0.01649116004682212, -0.011463558079088113),
    (2.0, 2.0, -150.0, 1.0, -0.02560575563925283, -0.003251513482524717, -0.0032533760139384026, 1.0143068457319116e-05),
    (2.0, 2.0, -220.0, 0.0, 0.05177223701610829, 0.0, 0.001573487130291898, 0.0),
    (2.0, 2.0, 60.0, 80.0, -248.00124791479575, -292.11729255739795, -15.710420884692073, -7.634058592398646),
    (2.0, 2.0, -600.0, 200.0, -0.1647590677674387, -1.1042322924741927, -0.02205419601221518, -0.0011609138835917859),
    (2.0, 2.0, 0.0, 5.0, 0.7933864909906007, 0.8086099741430379, 0.151863918512462, 0.08195847668607491),
    (2.0, 2.0, -1500.0, 30.0, 0.023903083207250597, -0.005014938190663079, -0.00017347596214335222, -0.00011878047111059449),
    (1.5, 3.5, 0.5, 0.25, 0.3223917064082654, 0.011319967320185038, 0.045252888220404186, 0.0018915065641599827),
    (1.5, 3.5, -3.0, 0.0, 0.2024234554426098, 0.0, 0.025378558668118178, 0.0),
    (1.5, 3.5, -5.07543, 0.0, 0.15771052780302527, 0.0, 0.018139926134151076, 0.0),
    (1.5, 3.5, -17.5, 0.0, 0.05563051932159187, 0.0, 0.003177354699540682, 0.0),
    (1.5, 3.5, 12.0, -7.0, 0.7698230829862847, -1.7286690187579745, 0.12365771786463207, -0.29125864994490175),
    (1.5, 3.5, -40.0, 15.0, 0.021713262439255573, 0.008046103629169516, 0.00041441157750263095, 0.00034807079371822463),
    (1.5, 3.5, -150.0, 1.0, 0.006641300932816897, 4.410824494779123e-05, 4.410435423218821e-05, 5.858560857532957e-07),
    (1.5, 3.5, -220.0, 0.0, 0.004533798187407281, 0.0, 2.0555194444867345e-05, 0.0),
    (1.5, 3.5, 60.0, 80.0, -713.0532164129735, -13026.987988209165, -485.9114024397419, -1630.4645918937222),
    (1.5, 3.5, -600.0, 200.0, 0.001498871622682319, 0.0004991537219717006, 1.9974611452590234e-06, 1.4963328096855631e-06),
    (1.5, 3.5, 0.0, 5.0, 0.21918716674482, 0.18438045907835057, 0.02762948308050903, 0.030679843724052774),
];
