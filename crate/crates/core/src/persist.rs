//! Little-endian binary files for trained models and ingested datasets.
//!
//! Checkpoint layout: magic `AGSGR1`, `d: u32`, user count `u64`, topic
//! count `u64`, then per user `id: u64` and `d` f64, per topic `id: u32` and
//! `d` f64, then `w`, `c`, `lambda` as f64.

use std::fs;
use std::io::{Cursor, Read};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use crate::abpr::AttentionModel;
use crate::error::{Error, Result};
use crate::ingest::{DatasetSplit, GroupEvent, SplitPolicy};
use crate::network::GeoSocialNetwork;
use crate::types::{CheckIn, Poi, PoiId, TopicId, UserId, Vocabulary};

const MODEL_MAGIC: &[u8; 6] = b"AGSGR1";
const DATASET_MAGIC: &[u8; 6] = b"AGSGD1";

fn truncated(e: std::io::Error) -> Error {
    Error::Format(format!("truncated or corrupt file: {e}"))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_magic(r: &mut Cursor<Vec<u8>>, magic: &[u8; 6]) -> Result<()> {
    let mut m = [0u8; 6];
    r.read_exact(&mut m).map_err(truncated)?;
    if &m != magic {
        return Err(Error::Format("bad magic".into()));
    }
    Ok(())
}

fn read_len(r: &mut Cursor<Vec<u8>>, elem_bytes: usize) -> Result<usize> {
    let n = r.read_u64::<LE>().map_err(truncated)?;
    let left = r.get_ref().len() as u64 - r.position();
    if n.saturating_mul(elem_bytes as u64) > left {
        return Err(Error::Format(format!("count {n} exceeds remaining file size")));
    }
    Ok(n as usize)
}

pub fn model_to_bytes(model: &AttentionModel) -> Vec<u8> {
    let d = model.dim();
    let mut out = Vec::new();
    out.extend_from_slice(MODEL_MAGIC);
    out.write_u32::<LE>(d as u32).unwrap();
    out.write_u64::<LE>(model.users().len() as u64).unwrap();
    out.write_u64::<LE>(model.topics().len() as u64).unwrap();
    for &u in model.users() {
        out.write_u64::<LE>(u.0).unwrap();
        for &x in model.user_vec(u).expect("own user") {
            out.write_f64::<LE>(x).unwrap();
        }
    }
    for &t in model.topics() {
        out.write_u32::<LE>(t.0).unwrap();
        for &x in model.topic_vec(t).expect("own topic") {
            out.write_f64::<LE>(x).unwrap();
        }
    }
    for x in [model.w(), model.c(), model.l2()] {
        out.write_f64::<LE>(x).unwrap();
    }
    out
}

pub fn model_from_bytes(bytes: Vec<u8>) -> Result<AttentionModel> {
    let mut r = Cursor::new(bytes);
    read_magic(&mut r, MODEL_MAGIC)?;
    let d = r.read_u32::<LE>().map_err(truncated)? as usize;
    let n_users = r.read_u64::<LE>().map_err(truncated)? as usize;
    let n_topics = r.read_u64::<LE>().map_err(truncated)? as usize;
    let need = (n_users as u128) * (8 + 8 * d as u128) + (n_topics as u128) * (4 + 8 * d as u128) + 24;
    if need != (r.get_ref().len() as u128 - r.position() as u128) {
        return Err(Error::Format("checkpoint size does not match header".into()));
    }
    let mut users = Vec::with_capacity(n_users);
    let mut user_vecs = Vec::with_capacity(n_users * d);
    for _ in 0..n_users {
        users.push(UserId(r.read_u64::<LE>().map_err(truncated)?));
        for _ in 0..d {
            user_vecs.push(r.read_f64::<LE>().map_err(truncated)?);
        }
    }
    let mut topics = Vec::with_capacity(n_topics);
    let mut topic_vecs = Vec::with_capacity(n_topics * d);
    for _ in 0..n_topics {
        topics.push(TopicId(r.read_u32::<LE>().map_err(truncated)?));
        for _ in 0..d {
            topic_vecs.push(r.read_f64::<LE>().map_err(truncated)?);
        }
    }
    let w = r.read_f64::<LE>().map_err(truncated)?;
    let c = r.read_f64::<LE>().map_err(truncated)?;
    let l2 = r.read_f64::<LE>().map_err(truncated)?;
    AttentionModel::from_parts(d, users, user_vecs, topics, topic_vecs, w, c, l2)
}

pub fn save_model(path: impl AsRef<Path>, model: &AttentionModel) -> Result<()> {
    write_file(path.as_ref(), &model_to_bytes(model))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<AttentionModel> {
    let path = path.as_ref();
    model_from_bytes(fs::read(path).map_err(|e| Error::io(path, e))?)
}

/// An ingested network together with its chronological event split.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub network: GeoSocialNetwork,
    pub split: DatasetSplit,
}

impl Dataset {
    pub fn to_bytes(&self) -> Vec<u8> {
        let net = &self.network;
        let mut out = Vec::new();
        out.extend_from_slice(DATASET_MAGIC);
        let names = net.vocabulary().names();
        out.write_u64::<LE>(names.len() as u64).unwrap();
        for n in names {
            out.write_u32::<LE>(n.len() as u32).unwrap();
            out.extend_from_slice(n.as_bytes());
        }
        out.write_u64::<LE>(net.pois().len() as u64).unwrap();
        for p in net.pois().values() {
            out.write_u64::<LE>(p.id.0).unwrap();
            out.write_f64::<LE>(p.lat).unwrap();
            out.write_f64::<LE>(p.lon).unwrap();
            out.write_u32::<LE>(p.topic.0).unwrap();
        }
        let g = net.graph();
        out.write_u64::<LE>(g.num_users() as u64).unwrap();
        for u in g.users() {
            out.write_u64::<LE>(u.0).unwrap();
        }
        out.write_u64::<LE>(g.num_edges() as u64).unwrap();
        for (a, b) in g.edges() {
            out.write_u64::<LE>(a.0).unwrap();
            out.write_u64::<LE>(b.0).unwrap();
        }
        out.write_u64::<LE>(net.checkins().len() as u64).unwrap();
        for c in net.checkins() {
            out.write_u64::<LE>(c.user.0).unwrap();
            out.write_u64::<LE>(c.poi.0).unwrap();
            out.write_i64::<LE>(c.time).unwrap();
        }
        out.write_u64::<LE>(net.poi_links().len() as u64).unwrap();
        for (a, b) in net.poi_links() {
            out.write_u64::<LE>(a.0).unwrap();
            out.write_u64::<LE>(b.0).unwrap();
        }
        for events in [&self.split.train, &self.split.test] {
            out.write_u64::<LE>(events.len() as u64).unwrap();
            for e in events {
                out.write_u64::<LE>(e.poi.0).unwrap();
                out.write_i64::<LE>(e.time).unwrap();
                out.write_u32::<LE>(e.members.len() as u32).unwrap();
                for m in &e.members {
                    out.write_u64::<LE>(m.0).unwrap();
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Result<Self> {
        let mut r = Cursor::new(bytes);
        read_magic(&mut r, DATASET_MAGIC)?;
        let n = read_len(&mut r, 4)?;
        let mut names = Vec::with_capacity(n);
        for _ in 0..n {
            let len = r.read_u32::<LE>().map_err(truncated)? as usize;
            let mut buf = vec![0u8; len];
            r.read_exact(&mut buf).map_err(truncated)?;
            names.push(String::from_utf8(buf).map_err(|_| Error::Format("topic name is not UTF-8".into()))?);
        }
        let vocabulary = Vocabulary::from_names(names);
        if vocabulary.len() != n {
            return Err(Error::Format("duplicate topic names".into()));
        }
        let n = read_len(&mut r, 28)?;
        let mut pois = Vec::with_capacity(n);
        for _ in 0..n {
            let id = PoiId(r.read_u64::<LE>().map_err(truncated)?);
            let lat = r.read_f64::<LE>().map_err(truncated)?;
            let lon = r.read_f64::<LE>().map_err(truncated)?;
            let topic = TopicId(r.read_u32::<LE>().map_err(truncated)?);
            pois.push(Poi { id, lat, lon, topic });
        }
        let n = read_len(&mut r, 8)?;
        let mut users = Vec::with_capacity(n);
        for _ in 0..n {
            users.push(UserId(r.read_u64::<LE>().map_err(truncated)?));
        }
        let n = read_len(&mut r, 16)?;
        let mut edges = Vec::with_capacity(n);
        for _ in 0..n {
            let a = UserId(r.read_u64::<LE>().map_err(truncated)?);
            let b = UserId(r.read_u64::<LE>().map_err(truncated)?);
            edges.push((a, b));
        }
        let n = read_len(&mut r, 24)?;
        let mut checkins = Vec::with_capacity(n);
        for _ in 0..n {
            let user = UserId(r.read_u64::<LE>().map_err(truncated)?);
            let poi = PoiId(r.read_u64::<LE>().map_err(truncated)?);
            let time = r.read_i64::<LE>().map_err(truncated)?;
            checkins.push(CheckIn { user, poi, time });
        }
        let n = read_len(&mut r, 16)?;
        let mut links = Vec::with_capacity(n);
        for _ in 0..n {
            let a = PoiId(r.read_u64::<LE>().map_err(truncated)?);
            let b = PoiId(r.read_u64::<LE>().map_err(truncated)?);
            links.push((a, b));
        }
        let mut sides = Vec::with_capacity(2);
        for _ in 0..2 {
            let n = read_len(&mut r, 20)?;
            let mut events = Vec::with_capacity(n);
            for _ in 0..n {
                let poi = PoiId(r.read_u64::<LE>().map_err(truncated)?);
                let time = r.read_i64::<LE>().map_err(truncated)?;
                let m = r.read_u32::<LE>().map_err(truncated)? as usize;
                let mut members = Vec::with_capacity(m.min(1024));
                for _ in 0..m {
                    members.push(UserId(r.read_u64::<LE>().map_err(truncated)?));
                }
                events.push(GroupEvent { members, poi, time });
            }
            sides.push(events);
        }
        if r.position() != r.get_ref().len() as u64 {
            return Err(Error::Format("trailing bytes in dataset".into()));
        }
        let test = sides.pop().expect("two sides");
        let train = sides.pop().expect("two sides");
        let network = GeoSocialNetwork::with_users(users, &edges, pois, checkins, vocabulary)?.with_poi_links(links);
        Ok(Self { network, split: DatasetSplit { train, test, policy: SplitPolicy::ByTime80 } })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_file(path.as_ref(), &self.to_bytes())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_bytes(fs::read(path).map_err(|e| Error::io(path, e))?)
    }
}
