"""
Raw versus cleaned trials
=========================

Add blink-like pulses to 30% of the trials and compare three pipelines:
clean data, raw data with the artifacts left in, and amplitude rejection
at 90 uV.
"""

from nucleeg import (
    ArtifactConfig,
    GeneratorConfig,
    amplitude_reject,
    crossval,
    generate_dataset,
    inject_artifacts,
)

clean, _ = generate_dataset(GeneratorConfig(separation=0.5, seed=3))
raw = inject_artifacts(clean, ArtifactConfig(rate=0.3, amplitude=90.0, width=20, seed=3))

kept, rejected = amplitude_reject(raw, threshold=90.0)
print(f"rejected {len(rejected)} of {len(raw)} trials")

# %%
for name, data in (("clean", clean), ("raw", raw), ("rejected>90uV", kept)):
    r = crossval(data, seed=3)
    print(f"{name:>14}: n={len(data):3d} accuracy {r.aggregate['mean']['accuracy']:6.2f} "
          f"AUC {r.auc:.3f}")
