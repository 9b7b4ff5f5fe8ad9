"""Namespace constants and well-known IRIs used across the kernel."""

from .rdf import Iri

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
XSD = "http://www.w3.org/2001/XMLSchema#"
PROV = "http://www.w3.org/ns/prov#"
DCTERMS = "http://purl.org/dc/terms/"
QUDT = "http://qudt.org/schema/qudt/"
QUDT_UNIT = "http://qudt.org/vocab/unit/"
STEEL = "https://w3id.org/steel/ProcessOntology/"

DSMS = "https://w3id.org/dsms/"
DSMS_MEDIA = DSMS + "mediaType/"
DSMS_PLACEHOLDER = DSMS + "placeholder/"
DSMS_UNIT = DSMS + "unit/"

PREFIXES = {
    "rdf": RDF,
    "rdfs": RDFS,
    "xsd": XSD,
    "prov": PROV,
    "dcterms": DCTERMS,
    "qudt": QUDT,
    "unit": QUDT_UNIT,
    "steel": STEEL,
    "dsms": DSMS,
}

A = Iri(RDF + "type")
RDFS_LABEL = Iri(RDFS + "label")
RDFS_SUBCLASS_OF = Iri(RDFS + "subClassOf")
DCTERMS_DESCRIPTION = Iri(DCTERMS + "description")
QUDT_UNIT_PRED = Iri(QUDT + "unit")

PROV_ACTIVITY = Iri(PROV + "Activity")
PROV_ENTITY = Iri(PROV + "Entity")
PROV_AGENT = Iri(PROV + "Agent")
PROV_USED = Iri(PROV + "used")
PROV_WAS_GENERATED_BY = Iri(PROV + "wasGeneratedBy")
PROV_WAS_ASSOCIATED_WITH = Iri(PROV + "wasAssociatedWith")

DSMS_KITEM = Iri(DSMS + "KItem")
DSMS_KTYPE = Iri(DSMS + "ktype")
DSMS_HAS_ANNOTATION = Iri(DSMS + "hasAnnotation")
DSMS_IS_RELATED_TO = Iri(DSMS + "isRelatedTo")
DSMS_IS_INPUT_FOR = Iri(DSMS + "isInputFor")
DSMS_HAS_METADATUM = Iri(DSMS + "hasMetadatum")
DSMS_VALUE = Iri(DSMS + "value")
DSMS_ORIGINAL_KEY = Iri(DSMS + "originalKey")
DSMS_TERM_VALUE = Iri(DSMS + "termValue")
DSMS_HAS_COLUMN = Iri(DSMS + "hasColumn")
DSMS_COLUMN_NAME = Iri(DSMS + "columnName")
DSMS_ACCESS_URL = Iri(DSMS + "accessUrl")
DSMS_ORIGIN = Iri(DSMS + "origin")
DSMS_ORIGIN_FORM = Iri(DSMS + "Form")
DSMS_ORIGIN_INGEST = Iri(DSMS + "Ingest")
DSMS_ORIGIN_APP = Iri(DSMS + "App")
DSMS_FORM_VERSION = Iri(DSMS + "formVersion")
DSMS_VOCAB_TERM = Iri(DSMS + "VocabularyTerm")
DSMS_NAMESPACE = Iri(DSMS + "namespace")
DSMS_EXTERNAL_REFERENCE = Iri(DSMS + "ExternalReference")
DSMS_EXTERNAL_ID = Iri(DSMS + "externalId")
DSMS_RESOURCE_URL = Iri(DSMS + "resourceUrl")
DSMS_HOCKETT_SHERBY = Iri(DSMS + "HockettSherby")
DSMS_HAS_MODEL = Iri(DSMS + "hasModel")
DSMS_SIGMA_INITIAL = Iri(DSMS + "sigmaInitial")
DSMS_SIGMA_SATURATION = Iri(DSMS + "sigmaSaturation")
DSMS_HARDENING_RATE = Iri(DSMS + "hardeningRate")
DSMS_HARDENING_EXPONENT = Iri(DSMS + "hardeningExponent")
DSMS_RMS_RESIDUAL = Iri(DSMS + "rmsResidual")
DSMS_PLASTIC_STRAIN_MAX = Iri(DSMS + "plasticStrainMax")
DSMS_ROW_INDEX = Iri(DSMS + "rowIndex")
DSMS_SETTINGS = Iri(DSMS + "Settings")
DSMS_FAILED = Iri(DSMS + "failed")

VOCABULARY_GRAPH = "dsms://vocabulary"
PROVENANCE_GRAPH = "dsms://provenance"


def kitem_graph_iri(item_id: str) -> str:
    """Deterministic per-item graph name, derivable before the item exists."""
    return f"dsms://kitem/{item_id}"


def kitem_iri(item_id: str) -> Iri:
    return Iri(kitem_graph_iri(item_id))


def expansion_graph_iri(item_id: str, column: str) -> str:
    return f"dsms://kitem/{item_id}/expansion/{column}"


def file_entity_iri(item_id: str, filename: str) -> Iri:
    return Iri(f"dsms://kitem/{item_id}/files/{filename.replace(' ', '%20')}")


def run_iri(run_id: str) -> Iri:
    return Iri(f"dsms://run/{run_id}")


def app_iri(app_id: str) -> Iri:
    return Iri(f"dsms://app/{app_id}")
