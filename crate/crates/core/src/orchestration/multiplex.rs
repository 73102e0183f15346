use std::collections::HashSet;
use std::fmt;
use std::sync::mpsc::{channel, Receiver, Sender};
use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{ForgeError, Result};
use crate::sim::{noisy_outcomes, Circuit, Counts, NoiseModel};

#[derive(Debug, Clone, PartialEq)]
pub struct JobEntry {
    pub tag: String,
    pub circuit: Circuit,
    pub shots: u64,
}

/// Circuits on a common `n_qubits` register, measured in the Z basis.
/// Entry `i` samples from stream `i` of a generator seeded with `seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    n_qubits: usize,
    seed: u64,
    entries: Vec<JobEntry>,
}

impl Job {
    pub fn new(n_qubits: usize, seed: u64) -> Self {
        Self {
            n_qubits,
            seed,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, tag: impl Into<String>, circuit: Circuit, shots: u64) -> Result<()> {
        let tag = tag.into();
        if shots == 0 {
            return Err(ForgeError::Input(format!("entry {tag} has zero shots")));
        }
        if tag.is_empty() || tag.contains(char::is_whitespace) {
            return Err(ForgeError::Input(format!("invalid tag {tag:?}")));
        }
        if self.entries.iter().any(|e| e.tag == tag) {
            return Err(ForgeError::Input(format!("duplicate tag {tag}")));
        }
        if circuit.n_qubits() != self.n_qubits {
            return Err(ForgeError::LengthMismatch {
                expected: self.n_qubits,
                found: circuit.n_qubits(),
            });
        }
        self.entries.push(JobEntry { tag, circuit, shots });
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn entries(&self) -> &[JobEntry] {
        &self.entries
    }

    /// Audit text: a header line, then `tag circuit=<index> gates=<count> shots=<shots>`.
    pub fn manifest(&self) -> String {
        let mut out = format!("job qubits={} seed={}\n", self.n_qubits, self.seed);
        for (i, e) in self.entries.iter().enumerate() {
            out += &format!("{} circuit={i} gates={} shots={}\n", e.tag, e.circuit.len(), e.shots);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestLine {
    pub tag: String,
    pub circuit: usize,
    pub gates: usize,
    pub shots: u64,
}

/// Parse the entry lines of [`Job::manifest`]; returns `(qubits, seed, lines)`.
pub fn parse_manifest(text: &str) -> Result<(usize, u64, Vec<ManifestLine>)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let field = |tok: Option<&str>, key: &str, line: usize| -> Result<String> {
        tok.and_then(|t| t.strip_prefix(key)).and_then(|t| t.strip_prefix('='))
            .map(str::to_owned)
            .ok_or_else(|| ForgeError::parse(line, format!("expected {key}=...")))
    };
    let num = |s: String, line: usize| -> Result<u64> {
        s.parse().map_err(|_| ForgeError::parse(line, format!("bad number {s:?}")))
    };
    let (no, header) = lines.next().ok_or_else(|| ForgeError::parse(1, "empty manifest"))?;
    let mut t = header.split_whitespace();
    if t.next() != Some("job") {
        return Err(ForgeError::parse(no + 1, "manifest must start with 'job'"));
    }
    let qubits = num(field(t.next(), "qubits", no + 1)?, no + 1)? as usize;
    let seed = num(field(t.next(), "seed", no + 1)?, no + 1)?;
    let mut out = Vec::new();
    for (no, l) in lines {
        let mut t = l.split_whitespace();
        let tag = t.next().expect("line is not blank").to_owned();
        out.push(ManifestLine {
            tag,
            circuit: num(field(t.next(), "circuit", no + 1)?, no + 1)? as usize,
            gates: num(field(t.next(), "gates", no + 1)?, no + 1)? as usize,
            shots: num(field(t.next(), "shots", no + 1)?, no + 1)?,
        });
    }
    Ok((qubits, seed, out))
}

/// Counts per tag, in entry order.
pub type JobResult = Vec<(String, Counts)>;

/// A job placed on the device register at `offset`.
#[derive(Debug, Clone, PartialEq)]
struct Block {
    offset: usize,
    job: Job,
}

/// Several jobs sharing one device: merged entry `i` runs entry `i` of every
/// job that has one, each on its own qubit range.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplexedJob {
    n_qubits: usize,
    blocks: Vec<Block>,
}

impl MultiplexedJob {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.job.entries.len()).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Qubit ranges `(offset, width)` in submission order.
    pub fn ranges(&self) -> Vec<(usize, usize)> {
        self.blocks.iter().map(|b| (b.offset, b.job.n_qubits)).collect()
    }

    /// The merged device-wide circuit of entry `i`.
    pub fn merged_circuit(&self, i: usize) -> Result<Circuit> {
        let mut c = Circuit::new(self.n_qubits);
        for b in &self.blocks {
            if let Some(e) = b.job.entries.get(i) {
                c.extend(&e.circuit.embedded(self.n_qubits, b.offset)?)?;
            }
        }
        Ok(c)
    }
}

/// Offsets packing `widths` left to right with one idle qubit between jobs.
pub fn packed_offsets(widths: &[usize]) -> Vec<usize> {
    let mut next = 0;
    widths
        .iter()
        .map(|w| {
            let at = next;
            next += w + 1;
            at
        })
        .collect()
}

/// Place `jobs` at `offsets` on a `device_qubits` register. Ranges must not
/// overlap and must be separated by at least one idle qubit.
pub fn multiplex(jobs: &[Job], offsets: &[usize], device_qubits: usize) -> Result<MultiplexedJob> {
    if jobs.len() != offsets.len() {
        return Err(ForgeError::LengthMismatch {
            expected: jobs.len(),
            found: offsets.len(),
        });
    }
    let mut ranges: Vec<(usize, usize)> = jobs.iter().zip(offsets).map(|(j, &o)| (o, o + j.n_qubits)).collect();
    ranges.sort_unstable();
    for w in ranges.windows(2) {
        if w[1].0 < w[0].1 {
            return Err(ForgeError::Layout(format!("qubit ranges {:?} and {:?} overlap", w[0], w[1])));
        }
        if w[1].0 == w[0].1 {
            return Err(ForgeError::Layout(format!(
                "no buffer qubit between ranges {:?} and {:?}",
                w[0], w[1]
            )));
        }
    }
    if let Some(r) = ranges.last().filter(|r| r.1 > device_qubits) {
        return Err(ForgeError::Layout(format!("range {r:?} exceeds the {device_qubits}-qubit device")));
    }
    Ok(MultiplexedJob {
        n_qubits: device_qubits,
        blocks: jobs
            .iter()
            .zip(offsets)
            .map(|(j, &offset)| Block { offset, job: j.clone() })
            .collect(),
    })
}

/// Per-shot device outcomes of each merged entry.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplexedResult {
    n_qubits: usize,
    memory: Vec<Vec<u128>>,
}

impl MultiplexedResult {
    /// Aggregate device-wide counts of merged entry `i`. Device registers
    /// wider than a machine word are truncated to the low 64 qubits.
    pub fn counts(&self, i: usize) -> Counts {
        let mut c = Counts::new(self.n_qubits.min(64));
        for &o in &self.memory[i] {
            c.record(o as usize);
        }
        c
    }
}

/// Statevector device with stochastic Pauli noise.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedDevice {
    pub n_qubits: usize,
    pub noise: NoiseModel,
}

fn entry_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

impl SimulatedDevice {
    pub fn new(n_qubits: usize, noise: NoiseModel) -> Self {
        Self { n_qubits, noise }
    }

    /// Run one job on the low qubits of the device.
    pub fn run(&self, job: &Job) -> Result<JobResult> {
        let m = multiplex(std::slice::from_ref(job), &[0], self.n_qubits)?;
        let r = self.execute(&m)?;
        Ok(demultiplex(&m, &r)?.pop().expect("one job in, one result out"))
    }

    /// Execute every merged entry. Jobs share no gates, so the device state is
    /// a product over blocks and each block is sampled from its own job's
    /// stream; shot `s` of the device record combines shot `s` of each block.
    pub fn execute(&self, m: &MultiplexedJob) -> Result<MultiplexedResult> {
        if m.n_qubits > self.n_qubits {
            return Err(ForgeError::Layout(format!(
                "job needs {} qubits, device has {}",
                m.n_qubits, self.n_qubits
            )));
        }
        if m.n_qubits > 128 {
            return Err(ForgeError::Layout("device registers above 128 qubits are not supported".into()));
        }
        let mut memory = Vec::with_capacity(m.len());
        for i in 0..m.len() {
            let shots = m.blocks.iter().filter_map(|b| b.job.entries.get(i)).map(|e| e.shots).max().unwrap_or(0);
            let mut record = vec![0u128; shots as usize];
            for b in &m.blocks {
                let Some(e) = b.job.entries.get(i) else { continue };
                let mut rng = entry_rng(b.job.seed, i);
                let outcomes = noisy_outcomes(&e.circuit, &self.noise, e.shots, &mut rng)?;
                for (slot, o) in record.iter_mut().zip(outcomes) {
                    *slot |= (o as u128) << b.offset;
                }
            }
            memory.push(record);
        }
        Ok(MultiplexedResult {
            n_qubits: m.n_qubits,
            memory,
        })
    }
}

/// Route device records back to each job: the first `shots` records of the
/// entry, restricted to the job's qubit range.
pub fn demultiplex(m: &MultiplexedJob, r: &MultiplexedResult) -> Result<Vec<JobResult>> {
    if r.memory.len() != m.len() {
        return Err(ForgeError::LengthMismatch {
            expected: m.len(),
            found: r.memory.len(),
        });
    }
    Ok(m.blocks
        .iter()
        .map(|b| {
            let mask = (1u128 << b.job.n_qubits) - 1;
            b.job
                .entries
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let mut c = Counts::new(b.job.n_qubits);
                    for &o in &r.memory[i][..e.shots as usize] {
                        c.record(((o >> b.offset) & mask) as usize);
                    }
                    (e.tag.clone(), c)
                })
                .collect()
        })
        .collect())
}

/// Queue shared by concurrent submitters; [`Multiplexer::flush`] merges all
/// queued jobs, executes them as one batch and routes results back.
pub struct Multiplexer {
    device: SimulatedDevice,
    queue: Mutex<Vec<(Job, Sender<Result<JobResult>>)>>,
}

impl Multiplexer {
    pub fn new(device: SimulatedDevice) -> Self {
        Self {
            device,
            queue: Mutex::new(Vec::new()),
        }
    }

    pub fn submit(&self, job: Job) -> Receiver<Result<JobResult>> {
        let (tx, rx) = channel();
        self.queue.lock().expect("queue lock").push((job, tx));
        rx
    }

    /// Execute everything queued so far. Returns the number of jobs run.
    pub fn flush(&self) -> Result<usize> {
        let batch = std::mem::take(&mut *self.queue.lock().expect("queue lock"));
        if batch.is_empty() {
            return Ok(0);
        }
        let jobs: Vec<Job> = batch.iter().map(|(j, _)| j.clone()).collect();
        let offsets = packed_offsets(&jobs.iter().map(Job::n_qubits).collect::<Vec<_>>());
        let run = multiplex(&jobs, &offsets, self.device.n_qubits)
            .and_then(|m| self.device.execute(&m).and_then(|r| demultiplex(&m, &r)));
        match run {
            Ok(results) => {
                for ((_, tx), res) in batch.into_iter().zip(results) {
                    // A submitter that dropped its receiver no longer wants the result.
                    let _ = tx.send(Ok(res));
                }
            }
            Err(e) => {
                for (_, tx) in batch {
                    let _ = tx.send(Err(e.clone()));
                }
                return Err(e);
            }
        }
        Ok(jobs.len())
    }
}

impl fmt::Display for MultiplexedJob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "device qubits={}", self.n_qubits)?;
        for b in &self.blocks {
            let tags: HashSet<&str> = b.job.entries.iter().map(|e| e.tag.as_str()).collect();
            writeln!(f, "block offset={} width={} entries={}", b.offset, b.job.n_qubits, tags.len())?;
        }
        Ok(())
    }
}
