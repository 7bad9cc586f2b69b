use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use super::Record;
use crate::{Error, Result};

/// N views captured simultaneously by N distinct cameras.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiViewSample {
    /// Indices into the record slice the sample was built from.
    pub members: Vec<usize>,
    pub identities: Vec<u32>,
    pub cameras: Vec<u32>,
    /// All views show the same vehicle.
    pub correlated: bool,
}

impl MultiViewSample {
    pub fn new(records: &[Record], members: Vec<usize>, correlated: bool) -> Result<Self> {
        let identities: Vec<u32> = members.iter().map(|&i| records[i].identity).collect();
        let cameras: Vec<u32> = members.iter().map(|&i| records[i].camera).collect();
        let distinct_cams: BTreeSet<u32> = cameras.iter().copied().collect();
        if distinct_cams.len() != cameras.len() {
            return Err(Error::shape("views of one sample must come from distinct cameras"));
        }
        let same = identities.windows(2).all(|w| w[0] == w[1]);
        if correlated != same {
            return Err(Error::shape(format!(
                "correlation flag {correlated} disagrees with identities {identities:?}"
            )));
        }
        Ok(Self {
            members,
            identities,
            cameras,
            correlated,
        })
    }

    pub fn users(&self) -> usize {
        self.members.len()
    }

    /// Same-identity label used to supervise the gating module.
    pub fn gate_label(&self) -> f32 {
        if self.correlated {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairSet {
    pub samples: Vec<MultiViewSample>,
    /// Correlated draws abandoned because the identity lacked enough cameras.
    pub skipped: usize,
}

impl PairSet {
    pub fn correlated_count(&self) -> usize {
        self.samples.iter().filter(|s| s.correlated).count()
    }
}

/// Draws `count` samples of `users` views each. Every sample is correlated
/// with probability `correlated_fraction`; uncorrelated samples show
/// distinct identities.
pub fn build_pairs<R: Rng + ?Sized>(
    records: &[Record],
    users: usize,
    count: usize,
    correlated_fraction: f64,
    rng: &mut R,
) -> Result<PairSet> {
    if !(0.0..=1.0).contains(&correlated_fraction) {
        return Err(Error::config("correlated_fraction", "must lie in [0, 1]"));
    }
    if users == 0 {
        return Err(Error::config("users", "must be at least 1"));
    }
    // identity -> camera -> record indices
    let mut by_identity: BTreeMap<u32, BTreeMap<u32, Vec<usize>>> = BTreeMap::new();
    let mut by_camera: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        by_identity
            .entry(r.identity)
            .or_default()
            .entry(r.camera)
            .or_default()
            .push(i);
        by_camera.entry(r.camera).or_default().push(i);
    }
    let identities: Vec<u32> = by_identity.keys().copied().collect();
    let cameras: Vec<u32> = by_camera.keys().copied().collect();
    if cameras.len() < users {
        return Err(Error::config(
            "users",
            format!("{} users need at least as many cameras, found {}", users, cameras.len()),
        ));
    }
    if users > 1 && identities.len() < users {
        return Err(Error::config(
            "dataset",
            "not enough identities for uncorrelated samples",
        ));
    }

    let mut samples = Vec::with_capacity(count);
    let mut skipped = 0;
    let max_attempts = 50 * count.max(1);
    let mut attempts = 0;
    while samples.len() < count && attempts < max_attempts {
        attempts += 1;
        let correlated = rng.random_bool(correlated_fraction);
        if correlated {
            let id = *identities.choose(rng).expect("non-empty");
            let cams = &by_identity[&id];
            if cams.len() < users {
                skipped += 1;
                continue;
            }
            let mut cam_ids: Vec<u32> = cams.keys().copied().collect();
            cam_ids.shuffle(rng);
            let members = cam_ids[..users]
                .iter()
                .map(|c| *cams[c].choose(rng).expect("non-empty"))
                .collect();
            samples.push(MultiViewSample::new(records, members, true)?);
        } else {
            let mut cam_ids = cameras.clone();
            cam_ids.shuffle(rng);
            let mut used = BTreeSet::new();
            let mut members = Vec::with_capacity(users);
            for cam in &cam_ids[..users] {
                let pool = &by_camera[cam];
                let pick = (0..64)
                    .map(|_| *pool.choose(rng).expect("non-empty"))
                    .find(|&i| !used.contains(&records[i].identity));
                match pick {
                    Some(i) => {
                        used.insert(records[i].identity);
                        members.push(i);
                    }
                    None => break,
                }
            }
            if members.len() == users {
                // A single view is trivially consistent with itself.
                samples.push(MultiViewSample::new(records, members, users == 1)?);
            }
        }
    }
    if skipped > 0 {
        log::warn!("{skipped} correlated draws skipped: identity seen by fewer than {users} cameras");
    }
    Ok(PairSet { samples, skipped })
}
